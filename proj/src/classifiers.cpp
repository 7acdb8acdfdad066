#include "acap/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"

#include "acap/errors.hpp"
#include "acap/util.hpp"

namespace acap {

namespace {

void require_shapes(const ModelParams& params, const PairFeatures& x) {
    if (params.classes < 2 || params.features == 0) {
        throw ValidationError("model has invalid shape");
    }
    if (params.weights.size() != params.classes * params.features ||
        params.bias.size() != params.classes) {
        throw ValidationError("model parameter sizes do not match its declared shape");
    }
    if (x.size() != params.features) {
        throw ValidationError("feature length " + std::to_string(x.size()) +
                              " does not match model feature length " +
                              std::to_string(params.features));
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw ValidationError("non-finite feature value");
        }
    }
}

std::vector<double> logits_of(const ModelParams& params, const PairFeatures& x) {
    std::vector<double> z(params.classes);
    for (std::size_t c = 0; c < params.classes; ++c) {
        double acc = params.bias[c];
        const double* row = params.weights.data() + c * params.features;
        for (std::size_t j = 0; j < params.features; ++j) {
            acc += row[j] * x[j];
        }
        z[c] = acc;
    }
    return z;
}

Label argmax_lowest(const std::vector<double>& z) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < z.size(); ++c) {
        if (z[c] > z[best]) best = c;
    }
    return static_cast<Label>(best);
}

void validate_train_config(const TrainConfig& config) {
    if (config.epochs < 1) throw ValidationError("epochs must be >= 1");
    if (!(config.learning_rate > 0.0)) throw ValidationError("learning rate must be > 0");
    if (config.batch_size < 1) throw ValidationError("batch size must be >= 1");
    if (config.l2 < 0.0) throw ValidationError("l2 must be >= 0");
}

} // namespace

Label threshold_classify(double sim) {
    if (sim <= 0.4) return 0;
    if (sim <= 0.6) return 1;
    if (sim <= 0.8) return 2;
    return 3;
}

std::string_view loss_mode_name(LossMode mode) {
    return mode == LossMode::standard ? "standard" : "ordinal";
}

LossMode parse_loss_mode(std::string_view name) {
    if (name == "standard") return LossMode::standard;
    if (name == "ordinal") return LossMode::ordinal;
    throw ValidationError("unknown loss mode: " + std::string(name));
}

std::string_view weight_mode_name(WeightMode mode) {
    return mode == WeightMode::normalized ? "normalized" : "integer";
}

WeightMode parse_weight_mode(std::string_view name) {
    if (name == "normalized") return WeightMode::normalized;
    if (name == "integer") return WeightMode::integer;
    throw ValidationError("unknown weight mode: " + std::string(name));
}

ModelParams ModelParams::zeros(std::size_t classes, std::size_t features) {
    if (classes < 2) throw ValidationError("model needs at least two classes");
    if (features == 0) throw ValidationError("model needs at least one feature");
    ModelParams p;
    p.classes = classes;
    p.features = features;
    p.weights.assign(classes * features, 0.0);
    p.bias.assign(classes, 0.0);
    return p;
}

Prediction softmax_forward(const ModelParams& params, const PairFeatures& x) {
    require_shapes(params, x);
    std::vector<double> z = logits_of(params, x);
    const double zmax = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        total += v;
    }
    Prediction out;
    out.probs.resize(z.size());
    for (std::size_t c = 0; c < z.size(); ++c) {
        out.probs[c] = z[c] / total;
    }
    out.predicted = argmax_lowest(out.probs);
    return out;
}

double ordinal_weight(Label y, Label y_hat, std::size_t classes, WeightMode mode) {
    if (classes < 2) throw ValidationError("ordinal weight needs k >= 2");
    const auto in_range = [classes](Label l) {
        return l >= 0 && static_cast<std::size_t>(l) < classes;
    };
    if (!in_range(y) || !in_range(y_hat)) {
        throw ValidationError("label out of range for ordinal weight");
    }
    const double distance = std::abs(static_cast<double>(y_hat) - static_cast<double>(y));
    if (mode == WeightMode::normalized) {
        return 1.0 + distance / static_cast<double>(classes - 1);
    }
    return 1.0 + distance;
}

LossGradient loss_and_gradient(const ModelParams& params,
                               const std::vector<TrainExample>& examples,
                               const std::vector<std::size_t>& batch,
                               const TrainConfig& config) {
    if (batch.empty()) {
        throw ValidationError("cannot compute a loss on an empty batch");
    }
    LossGradient out;
    out.grad = ModelParams::zeros(params.classes, params.features);
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    for (std::size_t index : batch) {
        const TrainExample& ex = examples.at(index);
        if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= params.classes) {
            throw ValidationError("training label out of range: " + std::to_string(ex.label));
        }
        require_shapes(params, ex.features);
        std::vector<double> z = logits_of(params, ex.features);
        const double zmax = *std::max_element(z.begin(), z.end());
        double total = 0.0;
        for (double v : z) {
            total += std::exp(v - zmax);
        }
        const double lse = zmax + std::log(total);
        const Label y_hat = argmax_lowest(z);
        // Stop-gradient weight: scales the example's loss and gradient but is
        // itself treated as a constant.
        const double weight = config.loss_mode == LossMode::ordinal
                                  ? ordinal_weight(ex.label, y_hat, params.classes,
                                                   config.weight_mode)
                                  : 1.0;
        out.loss += weight * (lse - z[static_cast<std::size_t>(ex.label)]) * inv_batch;
        for (std::size_t c = 0; c < params.classes; ++c) {
            const double p = std::exp(z[c] - zmax) / total;
            const double gz =
                weight * (p - (static_cast<std::size_t>(ex.label) == c ? 1.0 : 0.0)) * inv_batch;
            out.grad.bias[c] += gz;
            double* grow = out.grad.weights.data() + c * params.features;
            for (std::size_t j = 0; j < params.features; ++j) {
                grow[j] += gz * ex.features[j];
            }
        }
    }

    if (config.l2 > 0.0) {
        double sq = 0.0;
        for (std::size_t i = 0; i < params.weights.size(); ++i) {
            sq += params.weights[i] * params.weights[i];
            out.grad.weights[i] += 2.0 * config.l2 * params.weights[i];
        }
        out.loss += config.l2 * sq;
    }
    return out;
}

LossGradient loss_and_gradient(const ModelParams& params,
                               const std::vector<TrainExample>& examples,
                               const TrainConfig& config) {
    std::vector<std::size_t> all(examples.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return loss_and_gradient(params, examples, all, config);
}

TrainResult train(const std::vector<TrainExample>& dataset, std::size_t classes,
                  const TrainConfig& config) {
    if (dataset.empty()) {
        throw ValidationError("cannot train on an empty dataset");
    }
    validate_train_config(config);
    const std::size_t features = dataset.front().features.size();
    if (features == 0) {
        throw ValidationError("training examples need at least one feature");
    }
    for (const auto& ex : dataset) {
        if (ex.features.size() != features) {
            throw ValidationError("training examples have mixed feature lengths");
        }
        if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= classes) {
            throw ValidationError("training label out of range: " + std::to_string(ex.label));
        }
    }

    TrainResult result;
    result.params = ModelParams::zeros(classes, features);
    result.epoch_loss.reserve(config.epochs);
    Rng rng(config.seed);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::size_t> batch;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        deterministic_shuffle(order, rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            batch.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(stop));
            const LossGradient lg = loss_and_gradient(result.params, dataset, batch, config);
            if (!std::isfinite(lg.loss)) {
                throw ValidationError("training diverged (non-finite loss at epoch " +
                                      std::to_string(epoch + 1) + "); lower the learning rate (" +
                                      std::to_string(config.learning_rate) + ")");
            }
            for (std::size_t i = 0; i < result.params.weights.size(); ++i) {
                result.params.weights[i] -= config.learning_rate * lg.grad.weights[i];
            }
            for (std::size_t c = 0; c < classes; ++c) {
                result.params.bias[c] -= config.learning_rate * lg.grad.bias[c];
            }
            epoch_loss += lg.loss * static_cast<double>(batch.size());
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(dataset.size()));
    }
    return result;
}

Label predict(const ModelParams& params, const PairFeatures& x) {
    return softmax_forward(params, x).predicted;
}

Label vote(const std::vector<Label>& member_predictions) {
    if (member_predictions.empty()) {
        throw ValidationError("cannot vote with no members");
    }
    std::int64_t sum = 0;
    for (Label l : member_predictions) {
        if (l < 0) {
            throw ValidationError("negative label in vote: " + std::to_string(l));
        }
        sum += l;
    }
    return static_cast<Label>(
        round_half_up_mean(sum, static_cast<std::int64_t>(member_predictions.size())));
}

Label predict(const Ensemble& ensemble, const PairFeatures& x) {
    if (ensemble.members.size() < 2) {
        throw ValidationError("an ensemble needs at least two members");
    }
    const std::size_t k = ensemble.members.front().classes;
    const std::size_t f = ensemble.members.front().features;
    std::vector<Label> predictions;
    predictions.reserve(ensemble.members.size());
    for (const auto& member : ensemble.members) {
        if (member.classes != k || member.features != f) {
            throw ValidationError("ensemble members have mismatched shapes");
        }
        predictions.push_back(predict(member, x));
    }
    return vote(predictions);
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
    const ModelParams& p = model.params;
    if (p.weights.size() != p.classes * p.features || p.bias.size() != p.classes) {
        throw ValidationError("refusing to save a model with inconsistent shapes");
    }
    for (double v : p.weights) {
        if (!std::isfinite(v)) throw ValidationError("refusing to save non-finite weights");
    }
    for (double v : p.bias) {
        if (!std::isfinite(v)) throw ValidationError("refusing to save non-finite bias");
    }
    nlohmann::json j;
    j["format"] = "acap-model";
    j["version"] = 1;
    j["classes"] = p.classes;
    j["features"] = p.features;
    j["loss_mode"] = std::string(loss_mode_name(model.loss_mode));
    j["weight_mode"] = std::string(weight_mode_name(model.weight_mode));
    j["seed"] = model.seed;
    j["weights"] = p.weights;
    j["bias"] = p.bias;
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write model file: " + path.string());
    }
    out << j.dump(2) << "\n";
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open model file: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": invalid JSON: " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "acap-model") {
            throw ParseError(path.string() + ": not a model file");
        }
        if (j.at("version").get<int>() != 1) {
            throw ParseError(path.string() + ": unsupported model version");
        }
        ModelFile model;
        model.params.classes = j.at("classes").get<std::size_t>();
        model.params.features = j.at("features").get<std::size_t>();
        model.loss_mode = parse_loss_mode(j.at("loss_mode").get<std::string>());
        model.weight_mode = parse_weight_mode(j.at("weight_mode").get<std::string>());
        model.seed = j.at("seed").get<std::uint64_t>();
        model.params.weights = j.at("weights").get<std::vector<double>>();
        model.params.bias = j.at("bias").get<std::vector<double>>();
        if (model.params.weights.size() != model.params.classes * model.params.features ||
            model.params.bias.size() != model.params.classes) {
            throw ParseError(path.string() + ": parameter sizes do not match declared shape");
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace acap
