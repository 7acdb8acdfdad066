// Acceptance suite: end-to-end checks of the library's central guarantees,
// each verified against an independent oracle implemented in this file and
// reported as a single PASS/FAIL line. Exits nonzero if any criterion fails.
//
// Usage: acap_acceptance <acap-binary> <sample-data-dir> <scratch-dir>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#ifndef _WIN32
#include <sys/wait.h>
#endif

#include "acap/annotation.hpp"
#include "acap/classifiers.hpp"
#include "acap/errors.hpp"
#include "acap/eval.hpp"
#include "acap/util.hpp"

namespace fs = std::filesystem;
using namespace acap;

namespace {

struct Context {
    fs::path binary;
    fs::path sample_dir;
    fs::path scratch;
};

// ---------------------------------------------------------------------------
// Independent oracles. These deliberately re-derive every quantity from its
// definition, sharing no code with the library.
// ---------------------------------------------------------------------------
namespace oracle {

// Weighted accuracy straight from the definition: one minus the mean
// absolute class distance over its maximum.
double weighted_accuracy(const std::vector<int>& preds, const std::vector<int>& truths,
                         int max_distance) {
    double total = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        total += std::abs(preds[i] - truths[i]);
    }
    return 1.0 - total / (static_cast<double>(preds.size()) * max_distance);
}

// Fleiss kappa recomputed item by item.
double fleiss_kappa(const std::vector<std::vector<int>>& ratings, int categories) {
    const std::size_t items = ratings.size();
    const std::size_t raters = ratings.front().size();
    double pbar = 0.0;
    std::vector<double> column(static_cast<std::size_t>(categories), 0.0);
    for (const auto& item : ratings) {
        std::vector<int> counts(static_cast<std::size_t>(categories), 0);
        for (int label : item) ++counts[static_cast<std::size_t>(label)];
        double agree = 0.0;
        for (int c = 0; c < categories; ++c) {
            const auto n = static_cast<double>(counts[static_cast<std::size_t>(c)]);
            agree += n * (n - 1.0);
            column[static_cast<std::size_t>(c)] += n;
        }
        pbar += agree / (static_cast<double>(raters) * (static_cast<double>(raters) - 1.0));
    }
    pbar /= static_cast<double>(items);
    double pe = 0.0;
    for (int c = 0; c < categories; ++c) {
        const double p = column[static_cast<std::size_t>(c)] /
                         (static_cast<double>(items) * static_cast<double>(raters));
        pe += p * p;
    }
    return (pbar - pe) / (1.0 - pe);
}

// Krippendorff alpha with ordinal distances, via disagreement ratios rather
// than the coincidence identity the library uses.
double ordinal_alpha(const std::vector<std::vector<int>>& ratings, int categories) {
    const auto k = static_cast<std::size_t>(categories);
    std::vector<std::vector<double>> o(k, std::vector<double>(k, 0.0));
    for (const auto& unit : ratings) {
        const auto m = static_cast<double>(unit.size());
        for (std::size_t i = 0; i < unit.size(); ++i) {
            for (std::size_t j = 0; j < unit.size(); ++j) {
                if (i == j) continue;
                o[static_cast<std::size_t>(unit[i])][static_cast<std::size_t>(unit[j])] +=
                    1.0 / (m - 1.0);
            }
        }
    }
    std::vector<double> marginal(k, 0.0);
    double n = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) marginal[a] += o[a][b];
        n += marginal[a];
    }
    const auto distance2 = [&](std::size_t a, std::size_t b) {
        if (a == b) return 0.0;
        const std::size_t lo = std::min(a, b);
        const std::size_t hi = std::max(a, b);
        double span = 0.0;
        for (std::size_t g = lo; g <= hi; ++g) span += marginal[g];
        span -= (marginal[a] + marginal[b]) / 2.0;
        return span * span;
    };
    double observed = 0.0;
    double expected = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            observed += o[a][b] * distance2(a, b) / n;
            expected += marginal[a] * marginal[b] * distance2(a, b) / (n * (n - 1.0));
        }
    }
    return 1.0 - observed / expected;
}

// Piecewise threshold rule restated independently.
int threshold(double sim) {
    if (sim <= 0.4) return 0;
    if (sim <= 0.6) return 1;
    if (sim <= 0.8) return 2;
    return 3;
}

// One-vs-rest logistic regression with plain full-batch gradient descent;
// a from-scratch separability check that shares nothing with the library's
// softmax trainer.
struct BinaryLr {
    std::vector<double> w;
    double b = 0.0;
};

int ovr_predict(const std::vector<BinaryLr>& models, const std::vector<double>& x) {
    int best = 0;
    double best_score = -1e300;
    for (std::size_t c = 0; c < models.size(); ++c) {
        double score = models[c].b;
        for (std::size_t j = 0; j < x.size(); ++j) score += models[c].w[j] * x[j];
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(c);
        }
    }
    return best;
}

std::vector<BinaryLr> ovr_fit(const std::vector<TrainExample>& data, int classes) {
    const std::size_t features = data.front().features.size();
    std::vector<BinaryLr> models;
    for (int c = 0; c < classes; ++c) {
        BinaryLr model;
        model.w.assign(features, 0.0);
        for (int iter = 0; iter < 400; ++iter) {
            std::vector<double> gw(features, 0.0);
            double gb = 0.0;
            for (const auto& ex : data) {
                double z = model.b;
                for (std::size_t j = 0; j < features; ++j) z += model.w[j] * ex.features[j];
                const double p = 1.0 / (1.0 + std::exp(-z));
                const double target = ex.label == c ? 1.0 : 0.0;
                const double delta = (p - target) / static_cast<double>(data.size());
                for (std::size_t j = 0; j < features; ++j) gw[j] += delta * ex.features[j];
                gb += delta;
            }
            for (std::size_t j = 0; j < features; ++j) model.w[j] -= 0.5 * gw[j];
            model.b -= 0.5 * gb;
        }
        models.push_back(std::move(model));
    }
    return models;
}

} // namespace oracle

// ---------------------------------------------------------------------------
// Criterion helpers
// ---------------------------------------------------------------------------

std::string format_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2fs", s);
    return buf;
}

std::string format_err(double e) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2e", e);
    return buf;
}

int run_command(const std::string& command) {
    const int status = std::system(command.c_str());
#ifdef _WIN32
    return status;
#else
    if (status == -1) return -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -1;
#endif
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string quoted(const fs::path& path) { return "\"" + path.string() + "\""; }

// ---------------------------------------------------------------------------
// Criteria. Each returns "" on success or a failure reason.
// ---------------------------------------------------------------------------

std::string criterion_weighted_accuracy(Context&, std::string& note) {
    constexpr double kTolerance = 1e-12;
    Rng rng(2024);
    double worst = 0.0;
    for (int draw = 0; draw < 1000; ++draw) {
        const std::size_t m = 1 + rng.bounded(50);
        std::vector<Label> preds(m);
        std::vector<Label> truths(m);
        std::vector<int> opreds(m);
        std::vector<int> otruths(m);
        for (std::size_t i = 0; i < m; ++i) {
            preds[i] = static_cast<Label>(rng.bounded(4));
            truths[i] = static_cast<Label>(rng.bounded(4));
            opreds[i] = preds[i];
            otruths[i] = truths[i];
        }
        const double got = weighted_accuracy(preds, truths, 3);
        const double want = oracle::weighted_accuracy(opreds, otruths, 3);
        worst = std::max(worst, std::abs(got - want));
        if (std::abs(got - want) > kTolerance) {
            return "draw " + std::to_string(draw) + ": " + std::to_string(got) + " vs oracle " +
                   std::to_string(want);
        }
    }
    note = "worst deviation " + format_err(worst);
    // Unit max distance must reduce to plain accuracy, bitwise, every time.
    for (int draw = 0; draw < 1000; ++draw) {
        const std::size_t m = 1 + rng.bounded(50);
        std::vector<Label> preds(m);
        std::vector<Label> truths(m);
        for (std::size_t i = 0; i < m; ++i) {
            preds[i] = static_cast<Label>(rng.bounded(2));
            truths[i] = static_cast<Label>(rng.bounded(2));
        }
        if (weighted_accuracy(preds, truths, 1) != accuracy(preds, truths)) {
            return "unit-distance draw " + std::to_string(draw) + " not bitwise equal";
        }
    }
    return "";
}

std::string criterion_agreement_statistics(Context&, std::string& note) {
    constexpr double kTolerance = 1e-9;
    Rng rng(77);
    double worst = 0.0;
    for (int draw = 0; draw < 50; ++draw) {
        const std::size_t items = 2 + rng.bounded(19);  // up to 20 items, 3 raters
        std::vector<std::vector<int>> ratings;
        bool degenerate = true;
        while (degenerate) {
            ratings.clear();
            for (std::size_t i = 0; i < items; ++i) {
                std::vector<int> row(3);
                for (auto& v : row) v = static_cast<int>(rng.bounded(4));
                ratings.push_back(row);
            }
            int first = ratings[0][0];
            for (const auto& row : ratings) {
                for (int v : row) {
                    if (v != first) degenerate = false;
                }
            }
        }
        std::vector<AnnotationRecord> records;
        for (std::size_t i = 0; i < items; ++i) {
            records.push_back({"a" + std::to_string(i), "c" + std::to_string(i),
                               {ratings[i][0], ratings[i][1], ratings[i][2]}});
        }
        const double kappa = fleiss_kappa(build_rating_matrix(records));
        const double kappa_want = oracle::fleiss_kappa(ratings, 4);
        const double alpha = krippendorff_alpha(records);
        const double alpha_want = oracle::ordinal_alpha(ratings, 4);
        worst = std::max({worst, std::abs(kappa - kappa_want), std::abs(alpha - alpha_want)});
        if (std::abs(kappa - kappa_want) > kTolerance) {
            return "kappa draw " + std::to_string(draw) + " off by " +
                   format_err(std::abs(kappa - kappa_want));
        }
        if (std::abs(alpha - alpha_want) > kTolerance) {
            return "alpha draw " + std::to_string(draw) + " off by " +
                   format_err(std::abs(alpha - alpha_want));
        }
    }

    // Perfect agreement must be exactly 1.0 for both statistics.
    const std::vector<AnnotationRecord> perfect{
        {"a1", "c1", {0, 0, 0}}, {"a2", "c2", {3, 3, 3}}, {"a3", "c3", {1, 1, 1}}};
    if (fleiss_kappa(build_rating_matrix(perfect)) != 1.0) {
        return "perfect-agreement kappa is not exactly 1.0";
    }
    if (krippendorff_alpha(perfect) != 1.0) {
        return "perfect-agreement alpha is not exactly 1.0";
    }

    // Single-category data must raise the dedicated degenerate error.
    const std::vector<AnnotationRecord> flat{{"a1", "c1", {2, 2, 2}}, {"a2", "c2", {2, 2, 2}}};
    try {
        (void)fleiss_kappa(build_rating_matrix(flat));
        return "single-category kappa did not raise";
    } catch (const DegenerateStatistic&) {
    }
    try {
        (void)krippendorff_alpha(flat);
        return "single-category alpha did not raise";
    } catch (const DegenerateStatistic&) {
    }
    note = "worst deviation " + format_err(worst);
    return "";
}

std::string criterion_loss_and_gradient(Context&, std::string& note) {
    // Weights: exact identity when correct, pinned ranges otherwise.
    for (Label y = 0; y < 4; ++y) {
        for (Label yh = 0; yh < 4; ++yh) {
            const double wn = ordinal_weight(y, yh, 4, WeightMode::normalized);
            const double wi = ordinal_weight(y, yh, 4, WeightMode::integer);
            if (y == yh && (wn != 1.0 || wi != 1.0)) return "correct prediction not weight 1";
            if (wn < 1.0 || wn > 2.0) return "normalized weight outside [1,2]";
            if (wi != 1.0 && wi != 2.0 && wi != 3.0 && wi != 4.0) {
                return "integer weight outside {1,2,3,4}";
            }
        }
    }

    // Analytic gradient against central differences with a pinned step.
    constexpr double kStep = 1e-5;
    constexpr double kMaxRelErr = 1e-5;
    Rng rng(303);
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        const std::size_t features = 3 + rng.bounded(5);
        std::vector<TrainExample> batch;
        for (int i = 0; i < 8; ++i) {
            std::vector<double> x(features);
            for (auto& v : x) v = rng.uniform(-1.0, 1.0);
            batch.push_back({std::move(x), static_cast<Label>(rng.bounded(4))});
        }
        TrainConfig config;
        config.loss_mode = draw % 2 == 0 ? LossMode::standard : LossMode::ordinal;
        config.weight_mode = draw % 4 < 2 ? WeightMode::normalized : WeightMode::integer;
        config.l2 = draw % 3 == 0 ? 0.0 : 1e-3;
        ModelParams params = ModelParams::zeros(4, features);
        for (auto& w : params.weights) w = rng.uniform(-1.0, 1.0);
        for (auto& b : params.bias) b = rng.uniform(-1.0, 1.0);

        const LossGradient lg = loss_and_gradient(params, batch, config);
        const auto check_coord = [&](double* coord, double analytic) {
            const double saved = *coord;
            *coord = saved + kStep;
            const double up = loss_and_gradient(params, batch, config).loss;
            *coord = saved - kStep;
            const double down = loss_and_gradient(params, batch, config).loss;
            *coord = saved;
            const double fd = (up - down) / (2 * kStep);
            const double rel = std::abs(analytic - fd) /
                               std::max({1.0, std::abs(analytic), std::abs(fd)});
            worst = std::max(worst, rel);
        };
        for (std::size_t i = 0; i < params.weights.size(); ++i) {
            check_coord(&params.weights[i], lg.grad.weights[i]);
        }
        for (std::size_t i = 0; i < params.bias.size(); ++i) {
            check_coord(&params.bias[i], lg.grad.bias[i]);
        }
        if (worst > kMaxRelErr) {
            return "gradient draw " + std::to_string(draw) + " relative error " +
                   format_err(worst);
        }
    }
    note = "max gradient relative error " + format_err(worst);
    return "";
}

std::string criterion_threshold_rule(Context&, std::string&) {
    Label previous = 0;
    for (int i = -100; i <= 100; ++i) {
        const double sim = static_cast<double>(i) / 100.0;
        const Label got = threshold_classify(sim);
        const int want = oracle::threshold(sim);
        if (got != want) {
            return "sim " + std::to_string(sim) + ": " + std::to_string(got) + " vs oracle " +
                   std::to_string(want);
        }
        if (got < previous) {
            return "not monotone at sim " + std::to_string(sim);
        }
        previous = got;
    }
    return "";
}

std::string criterion_separable_training(Context&, std::string& note) {
    SyntheticSpec spec;  // 100 per class, margin 1.0, no noise
    const SyntheticDataset data = generate_synthetic(spec, 42);

    // From-scratch one-vs-rest logistic regression confirms the data is
    // actually separable before the library trainer is judged on it.
    const auto ovr = oracle::ovr_fit(data.examples, 4);
    std::size_t oracle_correct = 0;
    for (const auto& ex : data.examples) {
        if (oracle::ovr_predict(ovr, ex.features) == ex.label) ++oracle_correct;
    }
    const double oracle_acc =
        static_cast<double>(oracle_correct) / static_cast<double>(data.examples.size());
    if (oracle_acc < 0.95) {
        return "independent logistic regression only reaches " + std::to_string(oracle_acc);
    }

    for (const LossMode mode : {LossMode::standard, LossMode::ordinal}) {
        TrainConfig config;  // 300 epochs by default
        config.loss_mode = mode;
        config.seed = 42;
        const TrainResult result = train(data.examples, 4, config);
        std::size_t correct = 0;
        for (const auto& ex : data.examples) {
            if (predict(result.params, ex.features) == ex.label) ++correct;
        }
        const double acc =
            static_cast<double>(correct) / static_cast<double>(data.examples.size());
        if (acc < 0.95) {
            return std::string(loss_mode_name(mode)) + " training accuracy " +
                   std::to_string(acc) + " below 0.95";
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "oracle accuracy %.3f", oracle_acc);
    note = buf;
    return "";
}

std::string criterion_vote_on_noisy_data(Context&, std::string&) {
    SyntheticSpec spec;
    spec.noise = 0.3;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ExperimentConfig config;
        config.repeats = 5;
        config.seed = seed;
        config.systems = {SystemKind::softmax_standard, SystemKind::softmax_ordinal,
                          SystemKind::vote};
        const auto examples = synthetic_examples(spec, 500 + seed);
        const ExperimentSummary summary = run_experiment(examples, config);
        const CellResult* vote_cell = nullptr;
        for (const auto& cell : summary.cells) {
            if (cell.accuracy.raw.size() != 5 || cell.wacc.raw.size() != 5) {
                return "cell " + cell.system + " missing repeat metrics (seed " +
                       std::to_string(seed) + ")";
            }
            if (!std::isfinite(cell.accuracy.mean) || !std::isfinite(cell.accuracy.std_dev) ||
                !std::isfinite(cell.wacc.mean) || !std::isfinite(cell.wacc.std_dev)) {
                return "cell " + cell.system + " has non-finite summary stats";
            }
            if (cell.system == "vote") vote_cell = &cell;
        }
        if (vote_cell == nullptr || vote_cell->members.size() != 3) {
            return "vote cell missing or without its three members (seed " +
                   std::to_string(seed) + ")";
        }
        double weakest = 1.0;
        for (const auto& member : vote_cell->members) {
            weakest = std::min(weakest, member.accuracy.mean);
        }
        if (vote_cell->accuracy.mean < weakest - 1e-12) {
            return "seed " + std::to_string(seed) + ": vote mean " +
                   std::to_string(vote_cell->accuracy.mean) + " below weakest member " +
                   std::to_string(weakest);
        }
    }
    return "";
}

std::string criterion_experiment_reproducibility(Context&, std::string&) {
    SyntheticSpec spec;
    spec.per_class = 250;  // 1000 pairs total
    spec.noise = 0.2;
    ExperimentConfig config;
    config.repeats = 5;
    config.seed = 99;
    config.systems = {SystemKind::softmax_standard, SystemKind::softmax_ordinal,
                      SystemKind::vote};
    config.train.epochs = 120;

    const ExperimentSummary first = run_experiment(synthetic_examples(spec, 7), config);
    if (first.groups.size() != 1) return "expected one pooled group";
    const GroupInfo& group = first.groups.front();
    if (group.examples != 1000 || group.train != 700 || group.test != 200 ||
        group.validation != 100) {
        return "split sizes " + std::to_string(group.train) + "/" + std::to_string(group.test) +
               "/" + std::to_string(group.validation) + " instead of 700/200/100";
    }
    if (first.repeats != 5) return "summary does not record 5 repeats";
    for (const auto& cell : first.cells) {
        if (cell.accuracy.raw.size() != 5) {
            return "cell " + cell.system + " ran " + std::to_string(cell.accuracy.raw.size()) +
                   " repeats instead of 5";
        }
    }

    const ExperimentSummary second = run_experiment(synthetic_examples(spec, 7), config);
    if (to_json(first).dump(2) != to_json(second).dump(2)) {
        return "summary json differs between identical runs";
    }
    if (to_text(first) != to_text(second)) {
        return "summary text differs between identical runs";
    }
    return "";
}

std::string criterion_aggregation_and_tiers(Context&, std::string&) {
    if (aggregate_labels({1, 1, 2}) != 1) return "mean of 1,1,2 did not round to 1";
    const AnnotationRecord unanimous{"a", "c", {1, 1, 1}};
    const AnnotationRecord near{"a", "c", {1, 1, 2}};
    const AnnotationRecord spread{"a", "c", {0, 1, 2}};
    if (make_labeled_pair(unanimous).tier != Tier::high) return "1,1,1 not high agreement";
    if (make_labeled_pair(near).tier != Tier::high) return "1,1,2 not high agreement";
    if (make_labeled_pair(spread).tier != Tier::low) return "0,1,2 not low agreement";
    return "";
}

std::string criterion_cli_pipeline(Context& ctx, std::string&) {
    const fs::path logs = ctx.scratch / "logs";
    fs::create_directories(logs);
    const fs::path corpus = ctx.scratch / "corpus";
    const fs::path exp_dir = ctx.scratch / "exp";
    const fs::path report_file = ctx.scratch / "report.txt";

    struct Step {
        const char* name;
        std::string command;
    };
    const std::vector<Step> steps{
        {"ingest", quoted(ctx.binary) + " ingest --documents " +
                       quoted(ctx.sample_dir / "documents.jsonl") + " --annotations " +
                       quoted(ctx.sample_dir / "annotations.jsonl") + " --out " +
                       quoted(corpus)},
        {"agreement", quoted(ctx.binary) + " agreement --corpus " + quoted(corpus) +
                          " --per-outlet --out " + quoted(ctx.scratch / "agreement.json")},
        {"embed", quoted(ctx.binary) + " embed --corpus " + quoted(corpus) +
                      " --mode tfidf --dim 0 --out " + quoted(ctx.scratch / "embeddings.tsv")},
        {"experiment", quoted(ctx.binary) + " experiment --corpus " + quoted(corpus) +
                           " --merge-outlets --repeats 5 --seed 7 --out " + quoted(exp_dir)},
        {"report", quoted(ctx.binary) + " report " + quoted(exp_dir / "summary.json") +
                       " --out " + quoted(report_file)},
    };
    for (const auto& step : steps) {
        const fs::path log = logs / (std::string(step.name) + ".log");
        const int code = run_command(step.command + " > " + quoted(log) + " 2>&1");
        if (code != 0) {
            return std::string(step.name) + " exited " + std::to_string(code) + "; see " +
                   log.string();
        }
    }

    const std::string report = read_file(report_file);
    if (report.find("accuracy, % mean (std):") == std::string::npos) {
        return "report lacks the accuracy table header";
    }
    // Cells are rendered as `NN.NN (NN.NN)`.
    const std::regex cell_pattern(R"(\d+\.\d{2} \(\d+\.\d{2}\))");
    if (!std::regex_search(report, cell_pattern)) {
        return "report table has no mean (std) cells";
    }
    return "";
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 4) {
        std::fprintf(stderr, "usage: acap_acceptance <acap-binary> <sample-dir> <scratch>\n");
        return 2;
    }
    Context ctx{argv[1], argv[2], argv[3]};
    fs::remove_all(ctx.scratch);
    fs::create_directories(ctx.scratch);

    struct Criterion {
        const char* label;
        double budget_seconds;
        std::function<std::string(Context&, std::string&)> run;
    };
    const std::vector<Criterion> criteria{
        {"weighted accuracy matches its definition and collapses to accuracy", 1.0,
         criterion_weighted_accuracy},
        {"agreement statistics match brute-force recomputation", 5.0,
         criterion_agreement_statistics},
        {"ordinal loss weights and analytic gradients check out", 10.0,
         criterion_loss_and_gradient},
        {"threshold rule matches an independent piecewise oracle", 1.0,
         criterion_threshold_rule},
        {"separable synthetic data trains to 95 percent in both loss modes", 30.0,
         criterion_separable_training},
        {"vote tracks or beats its weakest member on noisy data", 120.0,
         criterion_vote_on_noisy_data},
        {"experiments split 1000 pairs 700/200/100 and reproduce byte for byte", 60.0,
         criterion_experiment_reproducibility},
        {"label aggregation and agreement tiers match worked examples", 1.0,
         criterion_aggregation_and_tiers},
        {"command-line pipeline runs end to end on the bundled sample", 60.0,
         criterion_cli_pipeline},
    };

    bool all_passed = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& criterion = criteria[i];
        const auto start = std::chrono::steady_clock::now();
        std::string failure;
        std::string note;
        try {
            failure = criterion.run(ctx, note);
        } catch (const std::exception& e) {
            failure = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (failure.empty() && elapsed > criterion.budget_seconds) {
            failure = "exceeded " + format_seconds(criterion.budget_seconds) + " budget";
        }
        if (failure.empty()) {
            std::printf("PASS criterion %zu: %s (%s)%s%s\n", i + 1, criterion.label,
                        format_seconds(elapsed).c_str(), note.empty() ? "" : " - ",
                        note.c_str());
        } else {
            std::printf("FAIL criterion %zu: %s - %s (%s)\n", i + 1, criterion.label,
                        failure.c_str(), format_seconds(elapsed).c_str());
            all_passed = false;
        }
    }
    std::printf("%s\n", all_passed ? "acceptance: all criteria passed"
                                   : "acceptance: at least one criterion failed");
    return all_passed ? 0 : 1;
}
