#include "acap/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <utility>

#include "acap/errors.hpp"

namespace acap {

namespace {

void require_pred_shape(const std::vector<Label>& preds, const std::vector<Label>& truths) {
    if (preds.empty()) {
        throw ValidationError("metrics need at least one example");
    }
    if (preds.size() != truths.size()) {
        throw ValidationError("prediction count " + std::to_string(preds.size()) +
                              " does not match truth count " + std::to_string(truths.size()));
    }
}

void validate_fractions(const SplitFractions& f) {
    if (!(f.train > 0.0) || !(f.test > 0.0) || !(f.validation > 0.0)) {
        throw ValidationError("split fractions must all be positive");
    }
    const double sum = f.train + f.test + f.validation;
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("split fractions must sum to 1, got " + std::to_string(sum));
    }
}

std::uint64_t hash_tag(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (char ch : s) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ULL;
    }
    return h;
}

std::string format_cell(const MetricSummary& m) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f (%.2f)", m.mean * 100.0, m.std_dev * 100.0);
    return buf;
}

void append_row(std::string& out, const std::vector<std::string>& cells,
                const std::vector<std::size_t>& widths) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out += "  ";
        out += cells[i];
        if (i + 1 < cells.size()) {
            out.append(widths[i] - cells[i].size(), ' ');
        }
    }
    out += '\n';
}

std::string render_grid(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.size()) widths.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    std::string out;
    for (const auto& row : rows) {
        append_row(out, row, widths);
    }
    return out;
}

nlohmann::json metric_to_json(const MetricSummary& m) {
    nlohmann::json j;
    j["mean"] = m.mean;
    j["std"] = m.std_dev;
    j["raw"] = m.raw;
    return j;
}

MetricSummary metric_from_json(const nlohmann::json& j) {
    MetricSummary m;
    m.mean = j.at("mean").get<double>();
    m.std_dev = j.at("std").get<double>();
    m.raw = j.at("raw").get<std::vector<double>>();
    return m;
}

} // namespace

double accuracy(const std::vector<Label>& preds, const std::vector<Label>& truths) {
    require_pred_shape(preds, truths);
    std::int64_t matches = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] == truths[i]) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(preds.size());
}

double weighted_accuracy(const std::vector<Label>& preds, const std::vector<Label>& truths,
                         int max_distance) {
    require_pred_shape(preds, truths);
    if (max_distance < 1) {
        throw ValidationError("max distance must be >= 1");
    }
    std::int64_t total_distance = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const std::int64_t d = std::abs(static_cast<std::int64_t>(preds[i]) -
                                        static_cast<std::int64_t>(truths[i]));
        if (d > max_distance) {
            throw ValidationError("prediction distance " + std::to_string(d) +
                                  " exceeds maximum " + std::to_string(max_distance));
        }
        total_distance += d;
    }
    // Integer numerator: for max_distance 1 this divides the exact same
    // integers as accuracy, making the two bitwise equal on binary tasks.
    const std::int64_t denom = static_cast<std::int64_t>(preds.size()) * max_distance;
    return static_cast<double>(denom - total_distance) / static_cast<double>(denom);
}

std::vector<std::vector<std::int64_t>> confusion(const std::vector<Label>& preds,
                                                 const std::vector<Label>& truths,
                                                 std::size_t classes) {
    require_pred_shape(preds, truths);
    if (classes < 2) {
        throw ValidationError("confusion matrix needs at least two classes");
    }
    std::vector<std::vector<std::int64_t>> m(classes, std::vector<std::int64_t>(classes, 0));
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const Label t = truths[i];
        const Label p = preds[i];
        if (t < 0 || static_cast<std::size_t>(t) >= classes || p < 0 ||
            static_cast<std::size_t>(p) >= classes) {
            throw ValidationError("label out of range for confusion matrix");
        }
        ++m[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
    }
    return m;
}

MetricsReport evaluate(const std::vector<Label>& preds, const std::vector<Label>& truths,
                       std::size_t classes) {
    MetricsReport report;
    report.max_distance = static_cast<int>(classes) - 1;
    report.accuracy = accuracy(preds, truths);
    report.wacc = weighted_accuracy(preds, truths, report.max_distance);
    report.confusion = confusion(preds, truths, classes);
    report.examples = preds.size();
    return report;
}

SplitIndices split_indices(std::size_t count, const SplitFractions& fractions,
                           std::uint64_t seed) {
    if (count == 0) {
        throw ValidationError("cannot split an empty dataset");
    }
    validate_fractions(fractions);
    const double targets[3] = {static_cast<double>(count) * fractions.train,
                               static_cast<double>(count) * fractions.test,
                               static_cast<double>(count) * fractions.validation};
    std::size_t sizes[3];
    double remainders[3];
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        double base = std::floor(targets[i]);
        double frac = targets[i] - base;
        // A fraction this close to 1 is floating-point noise on an exact
        // product; treat it as the integer it wants to be.
        if (frac > 1.0 - 1e-9) {
            base += 1.0;
            frac = 0.0;
        }
        sizes[i] = static_cast<std::size_t>(base);
        remainders[i] = frac;
        assigned += sizes[i];
    }
    while (assigned > count) {  // unreachable in practice; keeps the cover exact
        int widest = 0;
        for (int i = 1; i < 3; ++i) {
            if (sizes[i] > sizes[widest]) widest = i;
        }
        --sizes[widest];
        --assigned;
    }
    std::size_t leftover = count - assigned;
    while (leftover > 0) {
        int best = -1;
        for (int i = 0; i < 3; ++i) {
            if (remainders[i] < 0.0) continue;
            if (best == -1 || remainders[i] > remainders[best]) best = i;
        }
        ++sizes[best];
        remainders[best] = -1.0;
        --leftover;
    }

    std::vector<std::size_t> perm(count);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    deterministic_shuffle(perm, rng);

    SplitIndices out;
    out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(sizes[0]));
    out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(sizes[0]),
                    perm.begin() + static_cast<std::ptrdiff_t>(sizes[0] + sizes[1]));
    out.validation.assign(perm.begin() + static_cast<std::ptrdiff_t>(sizes[0] + sizes[1]),
                          perm.end());
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    std::sort(out.validation.begin(), out.validation.end());
    return out;
}

std::string_view system_name(SystemKind kind) {
    switch (kind) {
        case SystemKind::threshold: return "threshold";
        case SystemKind::softmax_standard: return "softmax-standard";
        case SystemKind::softmax_ordinal: return "softmax-ordinal";
        case SystemKind::vote: return "vote";
    }
    return "unknown";
}

SystemKind parse_system(std::string_view name) {
    if (name == "threshold") return SystemKind::threshold;
    if (name == "softmax-standard") return SystemKind::softmax_standard;
    if (name == "softmax-ordinal") return SystemKind::softmax_ordinal;
    if (name == "vote") return SystemKind::vote;
    throw ValidationError("unknown system: " + std::string(name));
}

std::vector<SystemKind> parse_systems(std::string_view comma_separated) {
    std::vector<SystemKind> out;
    std::size_t begin = 0;
    while (begin <= comma_separated.size()) {
        std::size_t end = comma_separated.find(',', begin);
        if (end == std::string_view::npos) end = comma_separated.size();
        std::string_view part = comma_separated.substr(begin, end - begin);
        while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
        while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
        if (part.empty()) {
            throw ValidationError("empty system name in list: " + std::string(comma_separated));
        }
        out.push_back(parse_system(part));
        begin = end + 1;
        if (end == comma_separated.size()) break;
    }
    if (out.empty()) {
        throw ValidationError("no systems given");
    }
    return out;
}

std::string_view subset_name(Subset subset) {
    switch (subset) {
        case Subset::all: return "all";
        case Subset::high: return "high";
        case Subset::low: return "low";
    }
    return "unknown";
}

Subset parse_subset(std::string_view name) {
    if (name == "all") return Subset::all;
    if (name == "high") return Subset::high;
    if (name == "low") return Subset::low;
    throw ValidationError("unknown subset: " + std::string(name));
}

std::string_view label_space_name(LabelSpace space) {
    return space == LabelSpace::multiclass ? "multiclass" : "binary";
}

LabelSpace parse_label_space(std::string_view name) {
    if (name == "multiclass") return LabelSpace::multiclass;
    if (name == "binary") return LabelSpace::binary;
    throw ValidationError("unknown label space: " + std::string(name));
}

MetricSummary summarize(const std::vector<double>& raw) {
    if (raw.empty()) {
        throw ValidationError("cannot summarize an empty series");
    }
    MetricSummary out;
    out.raw = raw;
    out.mean = std::accumulate(raw.begin(), raw.end(), 0.0) / static_cast<double>(raw.size());
    double ss = 0.0;
    for (double v : raw) {
        const double d = v - out.mean;
        ss += d * d;
    }
    out.std_dev = std::sqrt(ss / static_cast<double>(raw.size()));
    return out;
}

nlohmann::json to_json(const ExperimentSummary& summary) {
    nlohmann::json j;
    j["format"] = "acap-summary";
    j["version"] = 1;
    nlohmann::json& c = j["config"];
    c["repeats"] = summary.repeats;
    c["split"]["train"] = summary.split.train;
    c["split"]["test"] = summary.split.test;
    c["split"]["validation"] = summary.split.validation;
    c["subset"] = std::string(subset_name(summary.subset));
    c["label_space"] = std::string(label_space_name(summary.label_space));
    c["merge_outlets"] = summary.merge_outlets;
    c["seed"] = summary.seed;
    c["sigma_threshold"] = summary.sigma_threshold;
    c["classes"] = summary.classes;
    c["train"]["epochs"] = summary.train.epochs;
    c["train"]["learning_rate"] = summary.train.learning_rate;
    c["train"]["batch_size"] = summary.train.batch_size;
    c["train"]["l2"] = summary.train.l2;
    c["train"]["weight_mode"] = std::string(weight_mode_name(summary.train.weight_mode));
    j["groups"] = nlohmann::json::array();
    for (const auto& g : summary.groups) {
        nlohmann::json gj;
        gj["outlet"] = g.outlet;
        gj["examples"] = g.examples;
        gj["train"] = g.train;
        gj["test"] = g.test;
        gj["validation"] = g.validation;
        j["groups"].push_back(std::move(gj));
    }
    j["cells"] = nlohmann::json::array();
    for (const auto& cell : summary.cells) {
        nlohmann::json cj;
        cj["system"] = cell.system;
        cj["outlet"] = cell.outlet;
        cj["accuracy"] = metric_to_json(cell.accuracy);
        cj["wacc"] = metric_to_json(cell.wacc);
        if (!cell.members.empty()) {
            cj["members"] = nlohmann::json::array();
            for (const auto& m : cell.members) {
                nlohmann::json mj;
                mj["name"] = m.name;
                mj["accuracy"] = metric_to_json(m.accuracy);
                cj["members"].push_back(std::move(mj));
            }
        }
        j["cells"].push_back(std::move(cj));
    }
    return j;
}

ExperimentSummary summary_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != "acap-summary") {
            throw ParseError("not an experiment summary");
        }
        if (j.at("version").get<int>() != 1) {
            throw ParseError("unsupported summary version");
        }
        ExperimentSummary s;
        const nlohmann::json& c = j.at("config");
        s.repeats = c.at("repeats").get<std::size_t>();
        s.split.train = c.at("split").at("train").get<double>();
        s.split.test = c.at("split").at("test").get<double>();
        s.split.validation = c.at("split").at("validation").get<double>();
        s.subset = parse_subset(c.at("subset").get<std::string>());
        s.label_space = parse_label_space(c.at("label_space").get<std::string>());
        s.merge_outlets = c.at("merge_outlets").get<bool>();
        s.seed = c.at("seed").get<std::uint64_t>();
        s.sigma_threshold = c.at("sigma_threshold").get<double>();
        s.classes = c.at("classes").get<std::size_t>();
        s.train.epochs = c.at("train").at("epochs").get<std::size_t>();
        s.train.learning_rate = c.at("train").at("learning_rate").get<double>();
        s.train.batch_size = c.at("train").at("batch_size").get<std::size_t>();
        s.train.l2 = c.at("train").at("l2").get<double>();
        s.train.weight_mode = parse_weight_mode(c.at("train").at("weight_mode").get<std::string>());
        for (const auto& gj : j.at("groups")) {
            GroupInfo g;
            g.outlet = gj.at("outlet").get<std::string>();
            g.examples = gj.at("examples").get<std::size_t>();
            g.train = gj.at("train").get<std::size_t>();
            g.test = gj.at("test").get<std::size_t>();
            g.validation = gj.at("validation").get<std::size_t>();
            s.groups.push_back(std::move(g));
        }
        for (const auto& cj : j.at("cells")) {
            CellResult cell;
            cell.system = cj.at("system").get<std::string>();
            cell.outlet = cj.at("outlet").get<std::string>();
            cell.accuracy = metric_from_json(cj.at("accuracy"));
            cell.wacc = metric_from_json(cj.at("wacc"));
            if (cj.contains("members")) {
                for (const auto& mj : cj.at("members")) {
                    MemberDiagnostic m;
                    m.name = mj.at("name").get<std::string>();
                    m.accuracy = metric_from_json(mj.at("accuracy"));
                    cell.members.push_back(std::move(m));
                }
            }
            s.cells.push_back(std::move(cell));
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid experiment summary: ") + e.what());
    }
}

std::string to_table(const ExperimentSummary& summary, std::string_view metric) {
    if (metric != "accuracy" && metric != "wacc") {
        throw ValidationError("unknown metric for table: " + std::string(metric));
    }
    std::vector<std::string> outlets;
    std::vector<std::string> systems;
    for (const auto& cell : summary.cells) {
        if (std::find(outlets.begin(), outlets.end(), cell.outlet) == outlets.end()) {
            outlets.push_back(cell.outlet);
        }
        if (std::find(systems.begin(), systems.end(), cell.system) == systems.end()) {
            systems.push_back(cell.system);
        }
    }
    std::sort(outlets.begin(), outlets.end());

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"system"};
    header.insert(header.end(), outlets.begin(), outlets.end());
    rows.push_back(std::move(header));
    for (const auto& system : systems) {
        std::vector<std::string> row{system};
        for (const auto& outlet : outlets) {
            const auto it = std::find_if(summary.cells.begin(), summary.cells.end(),
                                         [&](const CellResult& cell) {
                                             return cell.system == system && cell.outlet == outlet;
                                         });
            if (it == summary.cells.end()) {
                row.emplace_back("-");
            } else {
                row.push_back(format_cell(metric == "accuracy" ? it->accuracy : it->wacc));
            }
        }
        rows.push_back(std::move(row));
    }
    return render_grid(rows);
}

std::string to_text(const ExperimentSummary& summary) {
    std::string out;
    out += "experiment: subset=";
    out += subset_name(summary.subset);
    out += " label-space=";
    out += label_space_name(summary.label_space);
    out += " classes=" + std::to_string(summary.classes);
    out += " repeats=" + std::to_string(summary.repeats);
    out += " seed=" + std::to_string(summary.seed);
    if (summary.merge_outlets) {
        out += " merged-outlets";
    }
    out += "\n\ngroups:\n";
    std::vector<std::vector<std::string>> grows;
    grows.push_back({"outlet", "examples", "train", "test", "validation"});
    for (const auto& g : summary.groups) {
        grows.push_back({g.outlet, std::to_string(g.examples), std::to_string(g.train),
                         std::to_string(g.test), std::to_string(g.validation)});
    }
    out += render_grid(grows);
    out += "\naccuracy, % mean (std):\n";
    out += to_table(summary, "accuracy");
    out += "\nweighted accuracy, % mean (std):\n";
    out += to_table(summary, "wacc");

    std::vector<std::vector<std::string>> mrows;
    mrows.push_back({"member", "outlet", "accuracy"});
    for (const auto& cell : summary.cells) {
        for (const auto& m : cell.members) {
            mrows.push_back({m.name, cell.outlet, format_cell(m.accuracy)});
        }
    }
    if (mrows.size() > 1) {
        out += "\nvote members, % mean (std):\n";
        out += render_grid(mrows);
    }
    return out;
}

std::vector<EvalExample> filter_subset(const std::vector<EvalExample>& examples, Subset subset,
                                       double sigma_threshold) {
    if (subset == Subset::all) {
        return examples;
    }
    std::vector<EvalExample> out;
    for (const auto& e : examples) {
        const bool high = e.sigma <= sigma_threshold;
        if ((subset == Subset::high) == high) {
            out.push_back(e);
        }
    }
    return out;
}

namespace {

// Stable model identities inside one (repeat, group) cell. The vote ensemble
// reuses 1 and 2, so those systems and the ensemble see the same parameters.
constexpr int kTagStandard = 1;
constexpr int kTagOrdinal = 2;
constexpr int kTagOrdinalAlt = 3;

} // namespace

ExperimentSummary run_experiment(const std::vector<EvalExample>& examples,
                                 const ExperimentConfig& config) {
    if (config.repeats < 1) {
        throw ValidationError("repeats must be >= 1");
    }
    validate_fractions(config.split);
    if (!(config.sigma_threshold >= 0.0)) {
        throw ValidationError("sigma threshold must be >= 0");
    }
    if (config.systems.empty()) {
        throw ValidationError("no systems requested");
    }
    std::vector<SystemKind> systems;
    for (SystemKind kind : config.systems) {
        if (std::find(systems.begin(), systems.end(), kind) == systems.end()) {
            systems.push_back(kind);
        }
    }

    const std::size_t classes = config.label_space == LabelSpace::binary
                                    ? 2
                                    : static_cast<std::size_t>(kNumClasses);

    std::vector<EvalExample> pool = filter_subset(examples, config.subset, config.sigma_threshold);
    for (auto& e : pool) {
        require_label(e.label);
        if (config.label_space == LabelSpace::binary) {
            e.label = binarize(e.label);
        }
    }

    std::map<std::string, std::vector<EvalExample>> groups;
    for (auto& e : pool) {
        groups[config.merge_outlets ? std::string("ALL") : e.outlet].push_back(std::move(e));
    }
    if (groups.empty()) {
        throw ValidationError("no examples left after the subset filter");
    }

    const bool needs_threshold =
        std::find(systems.begin(), systems.end(), SystemKind::threshold) != systems.end();
    const bool needs_models = std::any_of(systems.begin(), systems.end(), [](SystemKind k) {
        return k != SystemKind::threshold;
    });
    const std::size_t minimum = 10 * classes;
    for (const auto& [outlet, group] : groups) {
        if (group.size() < minimum) {
            throw ValidationError("outlet " + outlet + " keeps only " +
                                  std::to_string(group.size()) +
                                  " examples after filtering; need at least " +
                                  std::to_string(minimum));
        }
        if (needs_models) {
            const std::size_t flen = group.front().features.size();
            if (flen == 0) {
                throw ValidationError("examples for outlet " + outlet + " carry no features");
            }
            for (const auto& e : group) {
                if (e.features.size() != flen) {
                    throw ValidationError("examples for outlet " + outlet +
                                          " have mixed feature lengths");
                }
            }
        }
        if (needs_threshold) {
            for (const auto& e : group) {
                if (!e.similarity.has_value()) {
                    throw ValidationError("threshold system needs a similarity score for every "
                                          "example (missing in outlet " +
                                          outlet + ")");
                }
            }
        }
    }

    ExperimentSummary summary;
    summary.repeats = config.repeats;
    summary.split = config.split;
    summary.subset = config.subset;
    summary.label_space = config.label_space;
    summary.merge_outlets = config.merge_outlets;
    summary.seed = config.seed;
    summary.sigma_threshold = config.sigma_threshold;
    summary.classes = classes;
    summary.train = config.train;

    for (const auto& [outlet, group] : groups) {
        const SplitIndices sizes = split_indices(
            group.size(), config.split,
            derive_seed(derive_seed(config.seed, 0), hash_tag(outlet)));
        summary.groups.push_back({outlet, group.size(), sizes.train.size(), sizes.test.size(),
                                  sizes.validation.size()});
    }

    const WeightMode alt_weight_mode = config.train.weight_mode == WeightMode::normalized
                                           ? WeightMode::integer
                                           : WeightMode::normalized;

    struct CellAccum {
        std::vector<double> acc;
        std::vector<double> wacc;
        std::map<std::string, std::vector<double>> member_acc;
    };
    std::map<std::pair<int, std::string>, CellAccum> accum;

    for (std::size_t r = 0; r < config.repeats; ++r) {
        const std::uint64_t repeat_seed = derive_seed(config.seed, r);
        for (const auto& [outlet, group] : groups) {
            // Group seeds hang off the outlet name, so adding an outlet never
            // perturbs another outlet's stream.
            const std::uint64_t group_seed = derive_seed(repeat_seed, hash_tag(outlet));
            const SplitIndices split = split_indices(group.size(), config.split, group_seed);

            std::vector<TrainExample> train_set;
            if (needs_models) {
                train_set.reserve(split.train.size());
                for (std::size_t i : split.train) {
                    train_set.push_back({group[i].features, group[i].label});
                }
            }
            std::vector<Label> truths;
            truths.reserve(split.test.size());
            for (std::size_t i : split.test) {
                truths.push_back(group[i].label);
            }

            std::map<int, ModelParams> models;
            const auto model_for = [&](int tag) -> const ModelParams& {
                const auto it = models.find(tag);
                if (it != models.end()) return it->second;
                TrainConfig tc = config.train;
                tc.seed = derive_seed(group_seed, static_cast<std::uint64_t>(tag));
                switch (tag) {
                    case kTagStandard: tc.loss_mode = LossMode::standard; break;
                    case kTagOrdinal: tc.loss_mode = LossMode::ordinal; break;
                    case kTagOrdinalAlt:
                        tc.loss_mode = LossMode::ordinal;
                        tc.weight_mode = alt_weight_mode;
                        break;
                    default: throw ValidationError("unknown model tag");
                }
                return models.emplace(tag, train(train_set, classes, tc).params).first->second;
            };

            for (SystemKind kind : systems) {
                std::vector<Label> preds;
                preds.reserve(split.test.size());
                std::vector<std::vector<Label>> member_preds;
                switch (kind) {
                    case SystemKind::threshold: {
                        for (std::size_t i : split.test) {
                            Label l = threshold_classify(*group[i].similarity);
                            preds.push_back(classes == 2 ? binarize(l) : l);
                        }
                        break;
                    }
                    case SystemKind::softmax_standard:
                    case SystemKind::softmax_ordinal: {
                        const ModelParams& m = model_for(
                            kind == SystemKind::softmax_standard ? kTagStandard : kTagOrdinal);
                        for (std::size_t i : split.test) {
                            preds.push_back(predict(m, group[i].features));
                        }
                        break;
                    }
                    case SystemKind::vote: {
                        const ModelParams& m1 = model_for(kTagStandard);
                        const ModelParams& m2 = model_for(kTagOrdinal);
                        const ModelParams& m3 = model_for(kTagOrdinalAlt);
                        member_preds.assign(3, {});
                        for (std::size_t i : split.test) {
                            const Label p1 = predict(m1, group[i].features);
                            const Label p2 = predict(m2, group[i].features);
                            const Label p3 = predict(m3, group[i].features);
                            member_preds[0].push_back(p1);
                            member_preds[1].push_back(p2);
                            member_preds[2].push_back(p3);
                            preds.push_back(vote({p1, p2, p3}));
                        }
                        break;
                    }
                }
                CellAccum& cell = accum[{static_cast<int>(kind), outlet}];
                cell.acc.push_back(accuracy(preds, truths));
                cell.wacc.push_back(
                    weighted_accuracy(preds, truths, static_cast<int>(classes) - 1));
                if (kind == SystemKind::vote) {
                    cell.member_acc["softmax-standard"].push_back(
                        accuracy(member_preds[0], truths));
                    cell.member_acc["softmax-ordinal"].push_back(
                        accuracy(member_preds[1], truths));
                    cell.member_acc["softmax-ordinal-alt"].push_back(
                        accuracy(member_preds[2], truths));
                }
            }
        }
    }

    for (const auto& [key, cell] : accum) {
        CellResult result;
        result.system = std::string(system_name(static_cast<SystemKind>(key.first)));
        result.outlet = key.second;
        result.accuracy = summarize(cell.acc);
        result.wacc = summarize(cell.wacc);
        for (const auto& [name, raw] : cell.member_acc) {
            result.members.push_back({name, summarize(raw)});
        }
        summary.cells.push_back(std::move(result));
    }
    return summary;
}

ExperimentSummary run_experiment(const DocumentSet& documents,
                                 const std::vector<AnnotationRecord>& records,
                                 const ExperimentConfig& config) {
    if (records.empty()) {
        throw ValidationError("experiment needs annotated pairs");
    }
    if (documents.empty()) {
        throw ValidationError("experiment needs documents");
    }

    std::map<std::string, Vectorizer> vectorizers;
    if (config.merge_outlets) {
        vectorizers.emplace("", fit_vectorizer(documents.all(), config.vectorizer));
    } else {
        vectorizers = fit_per_outlet(documents.all(), config.vectorizer);
    }

    // Documents recur across pairs; embed each once per vectorizer.
    std::map<std::pair<std::string, std::string>, DocVector> cache;
    const auto embed_once = [&](const std::string& vec_key, const Document& doc) -> const DocVector& {
        const auto key = std::make_pair(vec_key, doc.id);
        const auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        return cache.emplace(key, vectorizers.at(vec_key).embed(doc)).first->second;
    };

    const std::vector<LabeledPair> pairs = make_labeled_pairs(records, config.sigma_threshold);
    std::vector<EvalExample> examples;
    examples.reserve(pairs.size());
    for (const auto& pair : pairs) {
        const Document& article = documents.at(pair.article_id);
        const Document& comment = documents.at(pair.comment_id);
        const std::string vec_key = config.merge_outlets ? std::string() : article.outlet;
        EvalExample e;
        e.article_id = pair.article_id;
        e.comment_id = pair.comment_id;
        e.outlet = article.outlet;
        e.label = pair.label;
        e.sigma = pair.sigma;
        try {
            const DocVector& av = embed_once(vec_key, article);
            const DocVector& cv = embed_once(vec_key, comment);
            e.features = pair_features(av, cv);
        } catch (const ValidationError& err) {
            throw ValidationError("pair (" + pair.article_id + ", " + pair.comment_id +
                                  "): " + err.what());
        }
        e.similarity = e.features[2 * vectorizers.at(vec_key).dimension()];
        examples.push_back(std::move(e));
    }
    return run_experiment(examples, config);
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    if (spec.per_class == 0) {
        throw ValidationError("synthetic generator needs a positive per-class count");
    }
    if (spec.classes < 2) {
        throw ValidationError("synthetic generator needs at least two classes");
    }
    if (spec.features < spec.classes) {
        throw ValidationError("synthetic generator needs features >= classes");
    }
    if (!(spec.margin > 0.0)) {
        throw ValidationError("synthetic generator needs a positive margin");
    }
    if (spec.noise < 0.0 || spec.noise > 1.0) {
        throw ValidationError("synthetic noise must lie in [0, 1]");
    }

    SyntheticDataset out;
    out.examples.reserve(spec.per_class * spec.classes);
    out.clean_labels.reserve(spec.per_class * spec.classes);
    Rng rng(seed);
    const double jitter = spec.margin / 2.0;
    for (std::size_t c = 0; c < spec.classes; ++c) {
        for (std::size_t i = 0; i < spec.per_class; ++i) {
            TrainExample ex;
            ex.features.resize(spec.features);
            for (std::size_t j = 0; j < spec.features; ++j) {
                const double center = j == c ? 2.0 * spec.margin : 0.0;
                ex.features[j] = center + rng.uniform(-jitter, jitter);
            }
            const Label clean = static_cast<Label>(c);
            ex.label = clean;
            if (spec.noise > 0.0 && rng.next_double() < spec.noise) {
                const bool down_ok = c > 0;
                const bool up_ok = c + 1 < spec.classes;
                if (down_ok && up_ok) {
                    ex.label = clean + (rng.coin() ? 1 : -1);
                } else {
                    ex.label = up_ok ? clean + 1 : clean - 1;
                }
            }
            out.clean_labels.push_back(clean);
            out.examples.push_back(std::move(ex));
        }
    }
    return out;
}

std::vector<EvalExample> synthetic_examples(const SyntheticSpec& spec, std::uint64_t seed) {
    const SyntheticDataset data = generate_synthetic(spec, seed);
    std::vector<EvalExample> out;
    out.reserve(data.examples.size());
    for (std::size_t i = 0; i < data.examples.size(); ++i) {
        char article_id[32];
        char comment_id[32];
        std::snprintf(article_id, sizeof(article_id), "a%05zu", i);
        std::snprintf(comment_id, sizeof(comment_id), "c%05zu", i);
        EvalExample e;
        e.article_id = article_id;
        e.comment_id = comment_id;
        e.outlet = "synthetic";
        e.label = data.examples[i].label;
        e.sigma = data.examples[i].label == data.clean_labels[i] ? 0.0 : 0.8;
        e.features = data.examples[i].features;
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace acap
