#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "acap/annotation.hpp"
#include "acap/classifiers.hpp"
#include "acap/corpus.hpp"
#include "acap/features.hpp"
#include "acap/util.hpp"

namespace acap {

// Fraction of exact matches.
double accuracy(const std::vector<Label>& preds, const std::vector<Label>& truths);

// 1 - sum |pred - truth| / (m * D). Computed with an integer numerator, so
// with D = 1 it is bitwise equal to accuracy. Errors if any distance
// exceeds D.
double weighted_accuracy(const std::vector<Label>& preds, const std::vector<Label>& truths,
                         int max_distance);

// Entry (truth, pred) counts; entries sum to the example count.
std::vector<std::vector<std::int64_t>> confusion(const std::vector<Label>& preds,
                                                 const std::vector<Label>& truths,
                                                 std::size_t classes);

struct MetricsReport {
    double accuracy = 0.0;
    double wacc = 0.0;
    std::vector<std::vector<std::int64_t>> confusion;
    std::size_t examples = 0;  // m
    int max_distance = 0;      // D, always classes - 1
};

MetricsReport evaluate(const std::vector<Label>& preds, const std::vector<Label>& truths,
                       std::size_t classes);

struct SplitFractions {
    double train = 0.7;
    double test = 0.2;
    double validation = 0.1;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<std::size_t> validation;
};

// Disjoint cover of [0, count). Sizes follow largest-remainder rounding of
// the fractions; membership is a seeded permutation; indices are sorted
// within each part.
SplitIndices split_indices(std::size_t count, const SplitFractions& fractions,
                           std::uint64_t seed);

template <typename T>
struct SplitParts {
    std::vector<T> train;
    std::vector<T> test;
    std::vector<T> validation;
};

template <typename T>
SplitParts<T> split_dataset(const std::vector<T>& items, const SplitFractions& fractions,
                            std::uint64_t seed) {
    const SplitIndices idx = split_indices(items.size(), fractions, seed);
    SplitParts<T> parts;
    const auto take = [&items](const std::vector<std::size_t>& which, std::vector<T>& into) {
        into.reserve(which.size());
        for (std::size_t i : which) into.push_back(items[i]);
    };
    take(idx.train, parts.train);
    take(idx.test, parts.test);
    take(idx.validation, parts.validation);
    return parts;
}

// One labeled article-comment pair, featurized and ready to split. The
// similarity slot feeds the threshold system; feature-only datasets (for
// instance synthetic ones) may leave it empty.
struct EvalExample {
    std::string article_id;
    std::string comment_id;
    std::string outlet;
    Label label = 0;
    double sigma = 0.0;
    std::optional<double> similarity;
    PairFeatures features;
};

enum class SystemKind { threshold, softmax_standard, softmax_ordinal, vote };

std::string_view system_name(SystemKind kind);
SystemKind parse_system(std::string_view name);
std::vector<SystemKind> parse_systems(std::string_view comma_separated);

enum class Subset { all, high, low };
enum class LabelSpace { multiclass, binary };

std::string_view subset_name(Subset subset);
Subset parse_subset(std::string_view name);
std::string_view label_space_name(LabelSpace space);
LabelSpace parse_label_space(std::string_view name);

struct ExperimentConfig {
    std::size_t repeats = 5;
    SplitFractions split;
    Subset subset = Subset::all;
    LabelSpace label_space = LabelSpace::multiclass;
    bool merge_outlets = false;
    std::uint64_t seed = 0;
    double sigma_threshold = 0.5;
    std::vector<SystemKind> systems{SystemKind::threshold, SystemKind::softmax_standard,
                                    SystemKind::softmax_ordinal, SystemKind::vote};
    TrainConfig train;             // loss/weight modes are set per system
    VectorizerConfig vectorizer;   // corpus entry point only
};

struct MetricSummary {
    double mean = 0.0;
    double std_dev = 0.0;          // population form over the repeats
    std::vector<double> raw;       // per repeat, in repeat order
};

MetricSummary summarize(const std::vector<double>& raw);

// Vote members are reported alongside the ensemble so their individual
// accuracy is visible next to the vote's.
struct MemberDiagnostic {
    std::string name;
    MetricSummary accuracy;
};

struct CellResult {
    std::string system;
    std::string outlet;
    MetricSummary accuracy;
    MetricSummary wacc;
    std::vector<MemberDiagnostic> members;  // vote cells only
};

struct GroupInfo {
    std::string outlet;
    std::size_t examples = 0;
    std::size_t train = 0;
    std::size_t test = 0;
    std::size_t validation = 0;
};

struct ExperimentSummary {
    std::size_t repeats = 0;
    SplitFractions split;
    Subset subset = Subset::all;
    LabelSpace label_space = LabelSpace::multiclass;
    bool merge_outlets = false;
    std::uint64_t seed = 0;
    double sigma_threshold = 0.5;
    std::size_t classes = 0;
    TrainConfig train;
    std::vector<GroupInfo> groups;  // sorted by outlet
    std::vector<CellResult> cells;  // sorted by (system, outlet)
};

nlohmann::json to_json(const ExperimentSummary& summary);
ExperimentSummary summary_from_json(const nlohmann::json& j);

// Plain-text tables, systems as rows and outlets as columns, each cell
// "mean (std)" in percent with two decimals.
std::string to_table(const ExperimentSummary& summary, std::string_view metric);
std::string to_text(const ExperimentSummary& summary);

// High keeps sigma <= threshold, low keeps sigma > threshold, all keeps
// everything; high and low partition the input exactly.
std::vector<EvalExample> filter_subset(const std::vector<EvalExample>& examples, Subset subset,
                                       double sigma_threshold);

// Repeated randomized-split protocol over featurized examples. Per repeat:
// derive a repeat seed, split each outlet group, train whichever models the
// requested systems need, evaluate on the test part. The validation part is
// reserved for systems that tune on it; none of the built-in ones do.
ExperimentSummary run_experiment(const std::vector<EvalExample>& examples,
                                 const ExperimentConfig& config);

// Corpus entry point: aggregates annotations, fits vectorizers (one per
// outlet, or one shared when merging), featurizes pairs, then delegates.
ExperimentSummary run_experiment(const DocumentSet& documents,
                                 const std::vector<AnnotationRecord>& records,
                                 const ExperimentConfig& config);

struct SyntheticSpec {
    std::size_t per_class = 100;
    std::size_t classes = 4;
    std::size_t features = 8;  // must be >= classes
    double margin = 1.0;
    double noise = 0.0;        // chance a label is displaced to an adjacent class
};

struct SyntheticDataset {
    std::vector<TrainExample> examples;  // labels possibly displaced
    std::vector<Label> clean_labels;     // pre-noise, same order
};

// Class c clusters around 2*margin along axis c with uniform jitter of
// half-width margin/2, so noise-free data is linearly separable. A displaced
// label always moves to an adjacent in-range class.
SyntheticDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

// Same generator shaped as experiment input: outlet "synthetic", sigma 0.0
// for clean labels and 0.8 for displaced ones, no similarity slot.
std::vector<EvalExample> synthetic_examples(const SyntheticSpec& spec, std::uint64_t seed);

} // namespace acap
