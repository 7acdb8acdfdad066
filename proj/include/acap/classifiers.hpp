#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "acap/corpus.hpp"
#include "acap/features.hpp"

namespace acap {

// Similarity-threshold baseline: sim <= 0.4 -> 0, <= 0.6 -> 1, <= 0.8 -> 2,
// else 3 (boundaries inclusive). Total over [-1, 1]; monotone in sim.
Label threshold_classify(double sim);

enum class LossMode { standard, ordinal };
enum class WeightMode { normalized, integer };

std::string_view loss_mode_name(LossMode mode);
LossMode parse_loss_mode(std::string_view name);
std::string_view weight_mode_name(WeightMode mode);
WeightMode parse_weight_mode(std::string_view name);

// Linear softmax classifier: logits = W x + b, row-major W of shape k x f.
struct ModelParams {
    std::size_t classes = 0;
    std::size_t features = 0;
    std::vector<double> weights;  // k*f row-major
    std::vector<double> bias;     // k

    static ModelParams zeros(std::size_t classes, std::size_t features);
    double& w(std::size_t c, std::size_t j) { return weights[c * features + j]; }
    double w(std::size_t c, std::size_t j) const { return weights[c * features + j]; }
};

struct TrainConfig {
    std::size_t epochs = 300;
    double learning_rate = 0.1;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    LossMode loss_mode = LossMode::standard;
    WeightMode weight_mode = WeightMode::normalized;
    double l2 = 1e-4;
};

struct Prediction {
    std::vector<double> probs;  // simplex, length k
    Label predicted = 0;        // argmax; ties break to the lowest index
};

// Numerically stable softmax (max-subtracted logits).
Prediction softmax_forward(const ModelParams& params, const PairFeatures& x);

// Penalty factor for a misprediction at ordinal distance |y_hat - y|:
// normalized mode 1 + |y_hat-y|/(k-1) in [1,2]; integer mode 1 + |y_hat-y|
// in {1..k}. Symmetric, 1 exactly when correct.
double ordinal_weight(Label y, Label y_hat, std::size_t classes, WeightMode mode);

struct TrainExample {
    PairFeatures features;
    Label label = 0;
};

struct LossGradient {
    double loss = 0.0;
    ModelParams grad;
};

// Mean over the batch of weight * cross-entropy, plus l2 * ||W||^2 (bias
// excluded). In ordinal mode the weight comes from the current forward
// argmax and is held constant during differentiation; in standard mode the
// weight is 1. The index overload lets training iterate mini-batches without
// copying examples.
LossGradient loss_and_gradient(const ModelParams& params,
                               const std::vector<TrainExample>& examples,
                               const std::vector<std::size_t>& batch,
                               const TrainConfig& config);
LossGradient loss_and_gradient(const ModelParams& params,
                               const std::vector<TrainExample>& examples,
                               const TrainConfig& config);

struct TrainResult {
    ModelParams params;
    std::vector<double> epoch_loss;  // one entry per epoch
};

// Mini-batch gradient descent from zero-initialized parameters, shuffling
// with a private deterministic stream. Bitwise-reproducible per seed.
TrainResult train(const std::vector<TrainExample>& dataset, std::size_t classes,
                  const TrainConfig& config);

Label predict(const ModelParams& params, const PairFeatures& x);

// Rounded mean of member class indices; same half-up rule as label
// aggregation.
Label vote(const std::vector<Label>& member_predictions);

struct Ensemble {
    std::vector<ModelParams> members;  // >= 2, identical shapes
};

Label predict(const Ensemble& ensemble, const PairFeatures& x);

// Self-describing model file: shape, the settings it was trained with, parameters.
struct ModelFile {
    ModelParams params;
    LossMode loss_mode = LossMode::standard;
    WeightMode weight_mode = WeightMode::normalized;
    std::uint64_t seed = 0;
};

void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

} // namespace acap
