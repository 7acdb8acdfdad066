#include "acap/cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "acap/annotation.hpp"
#include "acap/corpus.hpp"
#include "acap/errors.hpp"

namespace acap::cli {

namespace {

namespace fs = std::filesystem;

// Misuse of the tool itself (bad flag values, missing output targets);
// mapped to exit 2 rather than the runtime 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename F>
auto as_usage(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
}

void write_text_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write file: " + path.string());
    }
    out << content;
    if (!out) {
        throw ValidationError("write failed: " + path.string());
    }
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::optional<fs::path> env_out_dir() {
    const char* value = std::getenv("ACAP_OUT_DIR");
    if (value != nullptr && *value != '\0') {
        return fs::path(value);
    }
    return std::nullopt;
}

fs::path resolve_out_dir(const std::string& flag, const PipelineConfig& config) {
    if (!flag.empty()) return flag;
    if (config.out.has_value()) return *config.out;
    if (const auto env = env_out_dir()) return *env;
    throw UsageError("no output directory (pass --out, set \"out\" in --config, or set "
                     "ACAP_OUT_DIR)");
}

fs::path resolve_out_file(const std::string& flag, const PipelineConfig& config,
                          const std::string& default_name) {
    if (!flag.empty()) return flag;
    return resolve_out_dir(flag, config) / default_name;
}

fs::path resolve_corpus(const std::string& flag, const PipelineConfig& config) {
    if (!flag.empty()) return flag;
    if (config.corpus.has_value()) return *config.corpus;
    throw UsageError("no corpus directory (pass --corpus or set \"corpus\" in --config)");
}

struct CorpusData {
    DocumentSet documents;
    std::vector<AnnotationRecord> records;
};

CorpusData load_corpus_dir(const fs::path& dir) {
    const fs::path docs_path = dir / "documents.jsonl";
    const fs::path ann_path = dir / "annotations.jsonl";
    if (!fs::exists(docs_path) || !fs::exists(ann_path)) {
        throw ValidationError("not a corpus directory (expected documents.jsonl and "
                              "annotations.jsonl): " +
                              dir.string());
    }
    DocumentLoad load = load_documents(docs_path);
    for (const auto& warning : load.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }
    CorpusData data;
    data.records = load_annotations(ann_path, load.documents);
    data.documents = std::move(load.documents);
    return data;
}

std::optional<std::size_t> budget_from_flag(long long value) {
    if (value < 0) {
        throw UsageError("token budgets must be >= 0 (0 means unlimited)");
    }
    if (value == 0) return std::nullopt;
    return static_cast<std::size_t>(value);
}

void check_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
    for (const auto& item : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw ValidationError("unknown config key: " + where + item.key());
        }
    }
}

std::optional<std::size_t> budget_from_json(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    const auto value = j.get<long long>();
    if (value < 0) throw ValidationError("token budgets must be >= 0 (0 or null = unlimited)");
    if (value == 0) return std::nullopt;
    return static_cast<std::size_t>(value);
}

std::string format_stat(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

// Agreement statistics for one pool of records, with degenerate statistics
// reported as "undefined" instead of aborting the command.
struct AgreementStats {
    std::size_t items = 0;
    std::size_t raters = 0;
    std::size_t high = 0;
    std::size_t low = 0;
    double observed = 0.0;
    std::optional<double> kappa;
    std::optional<double> alpha;
    std::string kappa_band;
    std::string alpha_band;
};

std::string band_of(double value) {
    try {
        return std::string(band_name(interpret_kappa(value)));
    } catch (const ValidationError&) {
        return "out-of-range";
    }
}

AgreementStats compute_agreement(const std::vector<AnnotationRecord>& records,
                                 double sigma_threshold) {
    AgreementStats stats;
    const RatingMatrix matrix = build_rating_matrix(records);
    stats.items = matrix.items();
    stats.raters = matrix.raters;
    stats.observed = mean_observed_agreement(matrix);
    try {
        stats.kappa = fleiss_kappa(matrix);
        stats.kappa_band = band_of(*stats.kappa);
    } catch (const DegenerateStatistic&) {
        stats.kappa_band = "undefined";
    }
    try {
        stats.alpha = krippendorff_alpha(records);
        stats.alpha_band = band_of(*stats.alpha);
    } catch (const DegenerateStatistic&) {
        stats.alpha_band = "undefined";
    }
    const AgreementPartition partition = partition_by_agreement(records, sigma_threshold);
    stats.high = partition.high.size();
    stats.low = partition.low.size();
    return stats;
}

nlohmann::json agreement_to_json(const AgreementStats& stats) {
    nlohmann::json j;
    j["items"] = stats.items;
    j["raters"] = stats.raters;
    j["mean_observed_agreement"] = stats.observed;
    j["fleiss_kappa"] = stats.kappa.has_value() ? nlohmann::json(*stats.kappa)
                                                : nlohmann::json(nullptr);
    j["fleiss_band"] = stats.kappa_band;
    j["ordinal_alpha"] = stats.alpha.has_value() ? nlohmann::json(*stats.alpha)
                                                 : nlohmann::json(nullptr);
    j["alpha_band"] = stats.alpha_band;
    j["high_agreement"] = stats.high;
    j["low_agreement"] = stats.low;
    return j;
}

std::string agreement_to_text(const AgreementStats& stats, double sigma_threshold,
                              const std::string& indent) {
    char thr[32];
    std::snprintf(thr, sizeof(thr), "%.2f", sigma_threshold);
    std::string out;
    out += indent + "pairs: " + std::to_string(stats.items) +
           "  raters: " + std::to_string(stats.raters) + "\n";
    out += indent + "mean observed agreement: " + format_stat(stats.observed) + "\n";
    out += indent + "fleiss kappa:  " +
           (stats.kappa ? format_stat(*stats.kappa) + " (" + stats.kappa_band + ")"
                        : "undefined (single category)") +
           "\n";
    out += indent + "ordinal alpha: " +
           (stats.alpha ? format_stat(*stats.alpha) + " (" + stats.alpha_band + ")"
                        : "undefined (single value)") +
           "\n";
    out += indent + "high agreement (sigma <= " + thr + "): " + std::to_string(stats.high) +
           "\n";
    out += indent + "low agreement: " + std::to_string(stats.low) + "\n";
    return out;
}

nlohmann::json report_to_json(const ValidationReport& report) {
    nlohmann::json j;
    j["format"] = "acap-validation";
    j["version"] = 1;
    j["documents"] = report.document_count;
    j["annotations"] = report.annotation_count;
    j["violations"] = report.violations;
    j["orphan_documents"] = report.orphan_documents;
    j["class_proportions"] = report.class_proportions;
    j["per_outlet"] = nlohmann::json::object();
    for (const auto& [outlet, counts] : report.per_outlet) {
        nlohmann::json oj;
        oj["articles"] = counts.articles;
        oj["comments"] = counts.comments;
        oj["pairs"] = counts.pairs;
        oj["label_counts"] = counts.label_counts;
        j["per_outlet"][outlet] = std::move(oj);
    }
    return j;
}

std::map<std::string, Label> load_label_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open label file: " + path.string());
    }
    std::map<std::string, Label> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string ctx = path.string() + ":" + std::to_string(line_no);
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw ParseError(ctx + ": expected `id<TAB>label`");
        }
        int label = 0;
        const char* begin = line.data() + tab + 1;
        const char* end = line.data() + line.size();
        const auto res = std::from_chars(begin, end, label);
        if (res.ec != std::errc{} || res.ptr != end) {
            throw ParseError(ctx + ": malformed label");
        }
        if (!out.emplace(line.substr(0, tab), label).second) {
            throw ParseError(ctx + ": duplicate id: " + line.substr(0, tab));
        }
    }
    if (out.empty()) {
        throw ValidationError("label file is empty: " + path.string());
    }
    return out;
}

int run_ingest(const fs::path& documents_path, const fs::path& annotations_path,
               const fs::path& out_dir, double sigma_threshold) {
    DocumentLoad load = load_documents(documents_path);
    for (const auto& warning : load.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }
    const std::vector<AnnotationRecord> records =
        load_annotations(annotations_path, load.documents);
    const ValidationReport report = validate_corpus(load.documents, records);
    std::cout << to_text(report);
    if (!report.ok()) {
        throw Error("corpus validation failed (" + std::to_string(report.violations.size()) +
                    " violations)");
    }
    const std::vector<LabeledPair> pairs = make_labeled_pairs(records, sigma_threshold);

    fs::create_directories(out_dir);
    save_documents(out_dir / "documents.jsonl", load.documents);
    save_annotations(out_dir / "annotations.jsonl", records);
    std::string pairs_text;
    for (const auto& pair : pairs) {
        nlohmann::json j;
        j["article_id"] = pair.article_id;
        j["comment_id"] = pair.comment_id;
        j["label"] = pair.label;
        j["sigma"] = pair.sigma;
        j["tier"] = pair.tier == Tier::high ? "high" : "low";
        pairs_text += j.dump();
        pairs_text += '\n';
    }
    write_text_file(out_dir / "pairs.jsonl", pairs_text);
    write_json_file(out_dir / "validation.json", report_to_json(report));
    std::cout << "wrote corpus (" << load.documents.size() << " documents, " << pairs.size()
              << " labeled pairs) to " << out_dir.string() << "\n";
    return 0;
}

int run_agreement(const fs::path& corpus_dir, bool per_outlet, const std::string& out_flag,
                  double sigma_threshold) {
    const CorpusData corpus = load_corpus_dir(corpus_dir);
    const AgreementStats overall = compute_agreement(corpus.records, sigma_threshold);
    std::cout << "overall:\n" << agreement_to_text(overall, sigma_threshold, "  ");

    nlohmann::json j;
    j["format"] = "acap-agreement";
    j["version"] = 1;
    j["sigma_threshold"] = sigma_threshold;
    j["overall"] = agreement_to_json(overall);
    if (per_outlet) {
        std::map<std::string, std::vector<AnnotationRecord>> by_outlet;
        for (const auto& record : corpus.records) {
            by_outlet[corpus.documents.at(record.article_id).outlet].push_back(record);
        }
        j["per_outlet"] = nlohmann::json::object();
        for (const auto& [outlet, records] : by_outlet) {
            const AgreementStats stats = compute_agreement(records, sigma_threshold);
            std::cout << "outlet " << outlet << ":\n"
                      << agreement_to_text(stats, sigma_threshold, "  ");
            j["per_outlet"][outlet] = agreement_to_json(stats);
        }
    }
    if (!out_flag.empty()) {
        write_json_file(out_flag, j);
        std::cout << "wrote " << out_flag << "\n";
    }
    return 0;
}

int run_embed(const fs::path& corpus_dir, const VectorizerConfig& config, bool per_outlet,
              const fs::path& out_file) {
    const fs::path docs_path = corpus_dir / "documents.jsonl";
    if (!fs::exists(docs_path)) {
        throw ValidationError("not a corpus directory (expected documents.jsonl): " +
                              corpus_dir.string());
    }
    DocumentLoad load = load_documents(docs_path);
    for (const auto& warning : load.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }
    if (config.mode == VectorizerMode::hashed && config.dimension == 0) {
        throw UsageError("hashed mode needs --dim > 0");
    }

    std::map<std::string, DocVector> embeddings;
    if (per_outlet) {
        const std::map<std::string, Vectorizer> vectorizers =
            fit_per_outlet(load.documents.all(), config);
        for (const auto& doc : load.documents.all()) {
            embeddings.emplace(doc.id, vectorizers.at(doc.outlet).embed(doc));
        }
    } else {
        const Vectorizer vectorizer = fit_vectorizer(load.documents.all(), config);
        for (const auto& doc : load.documents.all()) {
            embeddings.emplace(doc.id, vectorizer.embed(doc));
        }
    }
    for (const auto& [id, vec] : embeddings) {
        if (vec.all_oov()) {
            std::cerr << "warning: document " << id << " embeds to a zero vector\n";
        }
    }
    try {
        save_embeddings(out_file, embeddings);
    } catch (const ValidationError& e) {
        if (per_outlet) {
            throw ValidationError(std::string(e.what()) +
                                  " (per-outlet tfidf vocabularies differ in size; use --mode "
                                  "hashed or a --dim small enough for every outlet)");
        }
        throw;
    }
    const std::size_t dimension = embeddings.empty() ? 0 : embeddings.begin()->second.size();
    std::cout << "wrote " << embeddings.size() << " embeddings (dimension " << dimension
              << ") to " << out_file.string() << "\n";
    return 0;
}

int run_train(const fs::path& features_path, const fs::path& labels_path,
              const fs::path& out_file, std::size_t classes, const TrainConfig& config) {
    const std::map<std::string, DocVector> features = load_external_embeddings(features_path);
    const std::map<std::string, Label> labels = load_label_file(labels_path);
    std::vector<TrainExample> dataset;
    dataset.reserve(labels.size());
    for (const auto& [id, label] : labels) {
        const auto it = features.find(id);
        if (it == features.end()) {
            throw ValidationError("no feature row for labeled id: " + id);
        }
        if (label < 0 || static_cast<std::size_t>(label) >= classes) {
            throw ValidationError("label out of range for id " + id + ": " +
                                  std::to_string(label));
        }
        dataset.push_back({it->second.values, label});
    }
    const TrainResult result = train(dataset, classes, config);
    save_model(out_file, ModelFile{result.params, config.loss_mode, config.weight_mode,
                                   config.seed});
    std::cout << "trained " << loss_mode_name(config.loss_mode) << " model on "
              << dataset.size() << " examples (" << config.epochs
              << " epochs, final loss " << format_stat(result.epoch_loss.back()) << "); wrote "
              << out_file.string() << "\n";
    return 0;
}

int run_predict(const fs::path& model_path, const fs::path& features_path,
                const fs::path& out_file) {
    const ModelFile model = load_model(model_path);
    const std::map<std::string, DocVector> features = load_external_embeddings(features_path);
    std::string out_text;
    for (const auto& [id, vec] : features) {
        const Label label = predict(model.params, vec.values);
        out_text += id;
        out_text += '\t';
        out_text += std::to_string(label);
        out_text += '\n';
    }
    write_text_file(out_file, out_text);
    std::cout << "wrote " << features.size() << " predictions to " << out_file.string() << "\n";
    return 0;
}

int run_experiment_cmd(const fs::path& corpus_dir, const ExperimentConfig& config,
                       const fs::path& out_dir) {
    const CorpusData corpus = load_corpus_dir(corpus_dir);
    const ExperimentSummary summary = run_experiment(corpus.documents, corpus.records, config);
    fs::create_directories(out_dir);
    write_json_file(out_dir / "summary.json", to_json(summary));
    const std::string text = to_text(summary);
    write_text_file(out_dir / "summary.txt", text);
    std::cout << text;
    std::cout << "wrote " << (out_dir / "summary.json").string() << "\n";
    return 0;
}

int run_report(const std::vector<std::string>& summary_paths, const std::string& out_flag) {
    std::vector<ExperimentSummary> summaries;
    summaries.reserve(summary_paths.size());
    for (const auto& path : summary_paths) {
        std::ifstream in(path);
        if (!in) {
            throw ParseError("cannot open summary file: " + path);
        }
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path + ": invalid JSON: " + e.what());
        }
        summaries.push_back(summary_from_json(j));
    }
    for (const auto& summary : summaries) {
        if (summary.label_space != summaries.front().label_space) {
            throw ValidationError("refusing to merge summaries with different label spaces "
                                  "(multiclass vs binary)");
        }
    }
    std::string text;
    for (const auto& summary : summaries) {
        text += "experiment: subset=";
        text += subset_name(summary.subset);
        text += " label-space=";
        text += label_space_name(summary.label_space);
        text += " repeats=" + std::to_string(summary.repeats);
        text += " seed=" + std::to_string(summary.seed);
        text += "\naccuracy, % mean (std):\n";
        text += to_table(summary, "accuracy");
        text += "\n";
    }
    if (!out_flag.empty()) {
        write_text_file(out_flag, text);
        std::cout << "wrote " << out_flag << "\n";
    } else {
        std::cout << text;
    }
    return 0;
}

} // namespace

PipelineConfig load_pipeline_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config file: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": invalid JSON: " + e.what());
    }
    PipelineConfig config;
    try {
        check_keys(j, {"corpus", "out", "vectorizer", "train", "experiment", "verbosity"}, "");
        if (j.contains("corpus")) {
            config.corpus = fs::path(j.at("corpus").get<std::string>());
            if (!fs::exists(*config.corpus)) {
                throw ValidationError("config corpus path does not exist: " +
                                      config.corpus->string());
            }
        }
        if (j.contains("out")) {
            config.out = fs::path(j.at("out").get<std::string>());
        }
        if (j.contains("verbosity")) {
            config.verbosity = j.at("verbosity").get<int>();
        }
        if (j.contains("vectorizer")) {
            const nlohmann::json& v = j.at("vectorizer");
            check_keys(v, {"mode", "dim", "hash_seed", "article_budget", "comment_budget"},
                       "vectorizer.");
            if (v.contains("mode")) {
                config.vectorizer.mode = parse_vectorizer_mode(v.at("mode").get<std::string>());
            }
            if (v.contains("dim")) config.vectorizer.dimension = v.at("dim").get<std::size_t>();
            if (v.contains("hash_seed")) {
                config.vectorizer.hash_seed = v.at("hash_seed").get<std::uint64_t>();
            }
            if (v.contains("article_budget")) {
                config.vectorizer.budget.article = budget_from_json(v.at("article_budget"));
            }
            if (v.contains("comment_budget")) {
                config.vectorizer.budget.comment = budget_from_json(v.at("comment_budget"));
            }
        }
        if (j.contains("train")) {
            const nlohmann::json& t = j.at("train");
            check_keys(t,
                       {"epochs", "learning_rate", "batch_size", "l2", "seed", "loss_mode",
                        "weight_mode"},
                       "train.");
            if (t.contains("epochs")) config.train.epochs = t.at("epochs").get<std::size_t>();
            if (t.contains("learning_rate")) {
                config.train.learning_rate = t.at("learning_rate").get<double>();
            }
            if (t.contains("batch_size")) {
                config.train.batch_size = t.at("batch_size").get<std::size_t>();
            }
            if (t.contains("l2")) config.train.l2 = t.at("l2").get<double>();
            if (t.contains("seed")) config.train.seed = t.at("seed").get<std::uint64_t>();
            if (t.contains("loss_mode")) {
                config.train.loss_mode = parse_loss_mode(t.at("loss_mode").get<std::string>());
            }
            if (t.contains("weight_mode")) {
                config.train.weight_mode =
                    parse_weight_mode(t.at("weight_mode").get<std::string>());
            }
        }
        if (j.contains("experiment")) {
            const nlohmann::json& e = j.at("experiment");
            check_keys(e,
                       {"repeats", "subset", "label_space", "merge_outlets", "seed",
                        "sigma_threshold", "systems", "split"},
                       "experiment.");
            if (e.contains("repeats")) {
                config.experiment.repeats = e.at("repeats").get<std::size_t>();
            }
            if (e.contains("subset")) {
                config.experiment.subset = parse_subset(e.at("subset").get<std::string>());
            }
            if (e.contains("label_space")) {
                config.experiment.label_space =
                    parse_label_space(e.at("label_space").get<std::string>());
            }
            if (e.contains("merge_outlets")) {
                config.experiment.merge_outlets = e.at("merge_outlets").get<bool>();
            }
            if (e.contains("seed")) config.experiment.seed = e.at("seed").get<std::uint64_t>();
            if (e.contains("sigma_threshold")) {
                config.experiment.sigma_threshold = e.at("sigma_threshold").get<double>();
            }
            if (e.contains("systems")) {
                config.experiment.systems.clear();
                for (const auto& name : e.at("systems")) {
                    config.experiment.systems.push_back(parse_system(name.get<std::string>()));
                }
            }
            if (e.contains("split")) {
                const nlohmann::json& s = e.at("split");
                check_keys(s, {"train", "test", "validation"}, "experiment.split.");
                if (s.contains("train")) {
                    config.experiment.split.train = s.at("train").get<double>();
                }
                if (s.contains("test")) config.experiment.split.test = s.at("test").get<double>();
                if (s.contains("validation")) {
                    config.experiment.split.validation = s.at("validation").get<double>();
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return config;
}

int dispatch(int argc, const char* const* argv) {
    static constexpr std::array<std::string_view, 7> kSubcommands{
        "ingest", "agreement", "embed", "train", "predict", "experiment", "report"};
    if (argc >= 2) {
        const std::string_view first = argv[1];
        if (!first.empty() && first.front() != '-' &&
            std::find(kSubcommands.begin(), kSubcommands.end(), first) == kSubcommands.end()) {
            std::cerr << "error: unknown subcommand '" << first << "'\n";
            return 2;
        }
    }

    CLI::App app{"article-comment relevance pipeline"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file with shared defaults");
    int verbosity = 0;
    app.add_flag("-v,--verbose", verbosity, "print extra progress detail");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "validate raw files and write a corpus directory");
    std::string ingest_documents;
    std::string ingest_annotations;
    std::string ingest_out;
    double ingest_sigma = 0.5;
    ingest->add_option("--documents", ingest_documents, "documents JSONL file")->required();
    ingest->add_option("--annotations", ingest_annotations, "annotations JSONL file")->required();
    ingest->add_option("--out", ingest_out, "corpus directory to create");
    ingest->add_option("--sigma-threshold", ingest_sigma,
                       "sigma at or below which a pair counts as high agreement");

    // agreement
    auto* agreement = app.add_subcommand("agreement", "inter-annotator agreement statistics");
    std::string agreement_corpus;
    std::string agreement_out;
    bool agreement_per_outlet = false;
    double agreement_sigma = 0.5;
    agreement->add_option("--corpus", agreement_corpus, "corpus directory");
    agreement->add_option("--out", agreement_out, "also write the statistics as JSON here");
    agreement->add_flag("--per-outlet", agreement_per_outlet, "statistics per outlet as well");
    agreement->add_option("--sigma-threshold", agreement_sigma,
                          "sigma at or below which a pair counts as high agreement");

    // embed
    auto* embed = app.add_subcommand("embed", "fit a vectorizer and write document embeddings");
    std::string embed_corpus;
    std::string embed_out;
    std::string embed_mode;
    long long embed_dim = -1;
    bool embed_per_outlet = false;
    std::uint64_t embed_hash_seed = 0;
    long long embed_article_budget = -1;
    long long embed_comment_budget = -1;
    embed->add_option("--corpus", embed_corpus, "corpus directory");
    embed->add_option("--mode", embed_mode, "vectorizer mode: tfidf or hashed");
    embed->add_option("--dim", embed_dim, "dimension (hashed) or vocabulary cap (tfidf, 0 = all)");
    embed->add_flag("--per-outlet", embed_per_outlet, "fit one vectorizer per outlet");
    embed->add_option("--hash-seed", embed_hash_seed, "seed for the hashed vectorizer");
    embed->add_option("--article-budget", embed_article_budget,
                      "max tokens per article (0 = unlimited)");
    embed->add_option("--comment-budget", embed_comment_budget,
                      "max tokens per comment (0 = unlimited)");
    embed->add_option("--out", embed_out, "output TSV file");

    // train
    auto* train_cmd = app.add_subcommand("train", "train a softmax classifier on feature rows");
    std::string train_features;
    std::string train_labels;
    std::string train_out;
    std::string train_loss;
    std::string train_weight_mode;
    long long train_epochs = -1;
    double train_lr = -1.0;
    long long train_batch = -1;
    double train_l2 = -1.0;
    std::uint64_t train_seed = 0;
    long long train_classes = 4;
    train_cmd->add_option("--features", train_features, "feature rows, `id<TAB>v1 v2 ...`")
        ->required();
    train_cmd->add_option("--labels", train_labels, "labels, `id<TAB>label`")->required();
    train_cmd->add_option("--loss", train_loss, "loss mode: standard or ordinal");
    train_cmd->add_option("--weight-mode", train_weight_mode,
                          "ordinal weight mode: normalized or integer");
    train_cmd->add_option("--epochs", train_epochs, "training epochs");
    train_cmd->add_option("--lr", train_lr, "learning rate");
    train_cmd->add_option("--batch", train_batch, "mini-batch size");
    train_cmd->add_option("--l2", train_l2, "l2 penalty on the weight matrix");
    train_cmd->add_option("--seed", train_seed, "shuffling seed");
    train_cmd->add_option("--classes", train_classes, "number of classes");
    train_cmd->add_option("--out", train_out, "model file to write");

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "predict labels for feature rows");
    std::string predict_model;
    std::string predict_features;
    std::string predict_out;
    predict_cmd->add_option("--model", predict_model, "model file")->required();
    predict_cmd->add_option("--features", predict_features, "feature rows, `id<TAB>v1 v2 ...`")
        ->required();
    predict_cmd->add_option("--out", predict_out, "predictions TSV to write");

    // experiment
    auto* experiment = app.add_subcommand("experiment",
                                          "repeated randomized-split comparison of systems");
    std::string exp_corpus;
    std::string exp_out;
    std::string exp_systems;
    std::string exp_subset;
    std::string exp_labels;
    bool exp_merge = false;
    long long exp_repeats = -1;
    std::uint64_t exp_seed = 0;
    double exp_sigma = -1.0;
    std::vector<double> exp_split;
    std::string exp_mode;
    long long exp_dim = -1;
    std::uint64_t exp_hash_seed = 0;
    long long exp_article_budget = -1;
    long long exp_comment_budget = -1;
    long long exp_epochs = -1;
    double exp_lr = -1.0;
    long long exp_batch = -1;
    double exp_l2 = -1.0;
    std::string exp_weight_mode;
    experiment->add_option("--corpus", exp_corpus, "corpus directory");
    experiment->add_option("--systems", exp_systems,
                           "comma list of threshold, softmax-standard, softmax-ordinal, vote");
    experiment->add_option("--subset", exp_subset, "agreement subset: all, high, or low");
    experiment->add_option("--labels", exp_labels, "label space: multiclass or binary");
    experiment->add_flag("--merge-outlets", exp_merge, "pool all outlets into one group");
    experiment->add_option("--repeats", exp_repeats, "number of randomized repeats");
    experiment->add_option("--seed", exp_seed, "base seed for splits and training");
    experiment->add_option("--sigma-threshold", exp_sigma, "high-agreement sigma threshold");
    experiment->add_option("--split", exp_split, "train test validation fractions")
        ->expected(3);
    experiment->add_option("--mode", exp_mode, "vectorizer mode: tfidf or hashed");
    experiment->add_option("--dim", exp_dim,
                           "dimension (hashed) or vocabulary cap (tfidf, 0 = all)");
    experiment->add_option("--hash-seed", exp_hash_seed, "seed for the hashed vectorizer");
    experiment->add_option("--article-budget", exp_article_budget,
                           "max tokens per article (0 = unlimited)");
    experiment->add_option("--comment-budget", exp_comment_budget,
                           "max tokens per comment (0 = unlimited)");
    experiment->add_option("--epochs", exp_epochs, "training epochs");
    experiment->add_option("--lr", exp_lr, "learning rate");
    experiment->add_option("--batch", exp_batch, "mini-batch size");
    experiment->add_option("--l2", exp_l2, "l2 penalty on the weight matrix");
    experiment->add_option("--weight-mode", exp_weight_mode,
                           "ordinal weight mode: normalized or integer");
    experiment->add_option("--out", exp_out, "directory for summary.json and summary.txt");

    // report
    auto* report = app.add_subcommand("report", "render experiment summaries as tables");
    std::vector<std::string> report_files;
    std::string report_out;
    report->add_option("summaries", report_files, "summary.json files")
        ->required()
        ->expected(-1);
    report->add_option("--out", report_out, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        PipelineConfig config;
        if (!config_path.empty()) {
            config = load_pipeline_config(config_path);
        }
        if (verbosity == 0) {
            verbosity = config.verbosity;
        }

        if (app.got_subcommand(ingest)) {
            return run_ingest(ingest_documents, ingest_annotations,
                              resolve_out_dir(ingest_out, config), ingest_sigma);
        }
        if (app.got_subcommand(agreement)) {
            return run_agreement(resolve_corpus(agreement_corpus, config), agreement_per_outlet,
                                 agreement_out, agreement_sigma);
        }
        if (app.got_subcommand(embed)) {
            VectorizerConfig vc = config.vectorizer;
            if (!embed_mode.empty()) vc.mode = as_usage([&] { return parse_vectorizer_mode(embed_mode); });
            if (embed_dim >= 0) vc.dimension = static_cast<std::size_t>(embed_dim);
            if (embed->count("--hash-seed") > 0) vc.hash_seed = embed_hash_seed;
            if (embed_article_budget >= 0) vc.budget.article = budget_from_flag(embed_article_budget);
            if (embed_comment_budget >= 0) vc.budget.comment = budget_from_flag(embed_comment_budget);
            return run_embed(resolve_corpus(embed_corpus, config), vc, embed_per_outlet,
                             resolve_out_file(embed_out, config, "embeddings.tsv"));
        }
        if (app.got_subcommand(train_cmd)) {
            TrainConfig tc = config.train;
            if (!train_loss.empty()) tc.loss_mode = as_usage([&] { return parse_loss_mode(train_loss); });
            if (!train_weight_mode.empty()) {
                tc.weight_mode = as_usage([&] { return parse_weight_mode(train_weight_mode); });
            }
            if (train_epochs >= 0) tc.epochs = static_cast<std::size_t>(train_epochs);
            if (train_lr >= 0.0) tc.learning_rate = train_lr;
            if (train_batch >= 0) tc.batch_size = static_cast<std::size_t>(train_batch);
            if (train_l2 >= 0.0) tc.l2 = train_l2;
            if (train_cmd->count("--seed") > 0) tc.seed = train_seed;
            if (train_classes < 2) {
                throw UsageError("--classes must be >= 2");
            }
            return run_train(train_features, train_labels,
                             resolve_out_file(train_out, config, "model.json"),
                             static_cast<std::size_t>(train_classes), tc);
        }
        if (app.got_subcommand(predict_cmd)) {
            return run_predict(predict_model, predict_features,
                               resolve_out_file(predict_out, config, "predictions.tsv"));
        }
        if (app.got_subcommand(experiment)) {
            ExperimentConfig ec = config.experiment;
            ec.train = config.train;
            ec.vectorizer = config.vectorizer;
            if (!exp_systems.empty()) ec.systems = as_usage([&] { return parse_systems(exp_systems); });
            if (!exp_subset.empty()) ec.subset = as_usage([&] { return parse_subset(exp_subset); });
            if (!exp_labels.empty()) {
                ec.label_space = as_usage([&] { return parse_label_space(exp_labels); });
            }
            if (experiment->count("--merge-outlets") > 0) ec.merge_outlets = exp_merge;
            if (exp_repeats >= 0) ec.repeats = static_cast<std::size_t>(exp_repeats);
            if (experiment->count("--seed") > 0) ec.seed = exp_seed;
            if (exp_sigma >= 0.0) ec.sigma_threshold = exp_sigma;
            if (!exp_split.empty()) {
                ec.split = SplitFractions{exp_split[0], exp_split[1], exp_split[2]};
            }
            if (!exp_mode.empty()) {
                ec.vectorizer.mode = as_usage([&] { return parse_vectorizer_mode(exp_mode); });
            }
            if (exp_dim >= 0) ec.vectorizer.dimension = static_cast<std::size_t>(exp_dim);
            if (experiment->count("--hash-seed") > 0) ec.vectorizer.hash_seed = exp_hash_seed;
            if (exp_article_budget >= 0) {
                ec.vectorizer.budget.article = budget_from_flag(exp_article_budget);
            }
            if (exp_comment_budget >= 0) {
                ec.vectorizer.budget.comment = budget_from_flag(exp_comment_budget);
            }
            if (exp_epochs >= 0) ec.train.epochs = static_cast<std::size_t>(exp_epochs);
            if (exp_lr >= 0.0) ec.train.learning_rate = exp_lr;
            if (exp_batch >= 0) ec.train.batch_size = static_cast<std::size_t>(exp_batch);
            if (exp_l2 >= 0.0) ec.train.l2 = exp_l2;
            if (!exp_weight_mode.empty()) {
                ec.train.weight_mode = as_usage([&] { return parse_weight_mode(exp_weight_mode); });
            }
            if (ec.vectorizer.mode == VectorizerMode::hashed && ec.vectorizer.dimension == 0) {
                throw UsageError("hashed mode needs --dim > 0");
            }
            return run_experiment_cmd(resolve_corpus(exp_corpus, config), ec,
                                      resolve_out_dir(exp_out, config));
        }
        if (app.got_subcommand(report)) {
            return run_report(report_files, report_out);
        }
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace acap::cli
