#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "comprate/compression.hpp"
#include "comprate/rng.hpp"

namespace comprate {

enum class Head { regression, classifier };

enum class Direction { lower = 0, same = 1, higher = 2 };

inline std::string direction_name(Direction d) {
    switch (d) {
        case Direction::lower: return "lower";
        case Direction::same: return "same";
        default: return "higher";
    }
}

inline std::optional<Direction> direction_from_name(const std::string& s) {
    if (s == "lower") return Direction::lower;
    if (s == "same") return Direction::same;
    if (s == "higher") return Direction::higher;
    return std::nullopt;
}

/// Per-feature min-max scaler mapping training data into [0, 1]. Values seen
/// at prediction time clamp into the training range; a constant feature maps
/// to 0.5 everywhere.
class Scaler {
  public:
    Scaler() = default;
    Scaler(std::vector<double> mins, std::vector<double> maxs)
        : mins_(std::move(mins)), maxs_(std::move(maxs)) {
        if (mins_.size() != maxs_.size()) {
            throw std::invalid_argument("Scaler: min/max size mismatch");
        }
    }

    static Scaler fit(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) throw std::invalid_argument("Scaler::fit: no samples");
        std::vector<double> mins(rows[0].size(), std::numeric_limits<double>::infinity());
        std::vector<double> maxs(rows[0].size(), -std::numeric_limits<double>::infinity());
        for (const auto& row : rows) {
            if (row.size() != mins.size()) {
                throw std::invalid_argument("Scaler::fit: ragged rows");
            }
            for (std::size_t i = 0; i < row.size(); ++i) {
                mins[i] = std::min(mins[i], row[i]);
                maxs[i] = std::max(maxs[i], row[i]);
            }
        }
        return Scaler(std::move(mins), std::move(maxs));
    }

    std::size_t dims() const { return mins_.size(); }
    const std::vector<double>& mins() const { return mins_; }
    const std::vector<double>& maxs() const { return maxs_; }

    double transform_component(std::size_t i, double v) const {
        const double lo = mins_.at(i);
        const double hi = maxs_.at(i);
        if (hi == lo) return 0.5;
        const double y = (v - lo) / (hi - lo);
        return std::clamp(y, 0.0, 1.0);
    }

    /// Inverse map from [0, 1] back to data units. A constant feature inverts
    /// to its single observed value.
    double inverse_component(std::size_t i, double y) const {
        const double lo = mins_.at(i);
        const double hi = maxs_.at(i);
        if (hi == lo) return lo;
        return lo + y * (hi - lo);
    }

    std::vector<double> transform(const std::vector<double>& v) const {
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = transform_component(i, v[i]);
        return out;
    }

  private:
    std::vector<double> mins_;
    std::vector<double> maxs_;
};

struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weights;  // row-major, weights[o * in + i]
    std::vector<double> biases;   // one per output unit
};

/// Small feedforward network: sigmoid hidden layers plus either a 1-unit
/// sigmoid regression head or a 3-unit softmax direction classifier.
struct Network {
    std::vector<std::size_t> layer_sizes;
    std::vector<Layer> layers;
    Head head = Head::regression;

    std::size_t input_size() const { return layer_sizes.front(); }
    std::size_t output_size() const { return layer_sizes.back(); }
    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += l.weights.size() + l.biases.size();
        return n;
    }
};

struct TrainingConfig {
    double learning_rate = 0.1;
    int epochs = 2000;
    std::uint64_t seed = 1;
    double split_fraction = 0.7;

    void validate() const {
        if (!(learning_rate > 0.0) && learning_rate != 0.0) {
            throw std::invalid_argument("TrainingConfig: learning_rate must be >= 0");
        }
        if (epochs < 1) throw std::invalid_argument("TrainingConfig: epochs must be >= 1");
        if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
            throw std::invalid_argument("TrainingConfig: split_fraction must be in (0, 1)");
        }
    }
};

/// (C_w, dC_w) paired with the change in Discomfort Score over the window.
struct LabeledSample {
    std::array<double, 2> features{};
    double target = 0.0;
};

/// (C_w, dC_w) paired with the direction of the score change.
struct LabeledDirection {
    std::array<double, 2> features{};
    Direction label = Direction::same;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Weights and biases drawn uniformly from [-0.5, 0.5] with a seeded
/// deterministic generator; identical seeds give identical networks.
inline Network init_network(std::vector<std::size_t> sizes, Head head, std::uint64_t seed) {
    if (sizes.size() < 2) throw std::invalid_argument("init_network: need >= 2 layers");
    for (std::size_t s : sizes) {
        if (s == 0) throw std::invalid_argument("init_network: zero-size layer");
    }
    if (head == Head::classifier && sizes.back() != 3) {
        throw std::invalid_argument("init_network: classifier head needs 3 outputs");
    }

    Network net;
    net.layer_sizes = std::move(sizes);
    net.head = head;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
        Layer layer;
        layer.in = net.layer_sizes[l];
        layer.out = net.layer_sizes[l + 1];
        layer.weights.resize(layer.in * layer.out);
        layer.biases.resize(layer.out);
        for (auto& w : layer.weights) w = rng.uniform(-0.5, 0.5);
        for (auto& b : layer.biases) b = rng.uniform(-0.5, 0.5);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

namespace detail {

inline std::vector<double> softmax(std::vector<double> z) {
    double max_z = z[0];
    for (double v : z) max_z = std::max(max_z, v);
    double sum = 0.0;
    for (auto& v : z) {
        v = std::exp(v - max_z);
        sum += v;
    }
    for (auto& v : z) v /= sum;
    return z;
}

// Activations of every layer, input included; used by backprop.
inline std::vector<std::vector<double>> forward_trace(const Network& net,
                                                      const std::vector<double>& input) {
    std::vector<std::vector<double>> acts;
    acts.push_back(input);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        std::vector<double> z(layer.out);
        for (std::size_t o = 0; o < layer.out; ++o) {
            double sum = layer.biases[o];
            for (std::size_t i = 0; i < layer.in; ++i) {
                sum += layer.weights[o * layer.in + i] * acts.back()[i];
            }
            z[o] = sum;
        }
        const bool is_output = (l + 1 == net.layers.size());
        if (is_output && net.head == Head::classifier) {
            acts.push_back(softmax(std::move(z)));
        } else {
            for (auto& v : z) v = sigmoid(v);
            acts.push_back(std::move(z));
        }
    }
    return acts;
}

}  // namespace detail

/// Forward pass on an already-scaled input. Regression nets return one value
/// in (0, 1); classifier nets return three probabilities summing to 1.
inline std::vector<double> forward(const Network& net, const std::vector<double>& input) {
    if (input.size() != net.input_size()) {
        throw std::invalid_argument("forward: input size mismatch");
    }
    for (double v : input) {
        if (!std::isfinite(v)) throw std::invalid_argument("forward: non-finite input");
    }
    return detail::forward_trace(net, input).back();
}

/// Loss of one sample: squared error for the regression head, cross-entropy
/// against the one-hot target for the classifier head.
inline double sample_loss(const Network& net, const std::vector<double>& input,
                          const std::vector<double>& target) {
    const auto out = forward(net, input);
    if (target.size() != out.size()) throw std::invalid_argument("sample_loss: target size");
    if (net.head == Head::regression) {
        double loss = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            loss += (out[i] - target[i]) * (out[i] - target[i]);
        }
        return loss;
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (target[i] > 0.0) loss -= target[i] * std::log(std::max(out[i], 1e-300));
    }
    return loss;
}

/// Analytic gradient of sample_loss with respect to every weight and bias,
/// laid out like the network's own layers.
inline std::vector<Layer> loss_gradient(const Network& net, const std::vector<double>& input,
                                        const std::vector<double>& target) {
    const auto acts = detail::forward_trace(net, input);
    const auto& out = acts.back();
    if (target.size() != out.size()) throw std::invalid_argument("loss_gradient: target size");

    // delta = dL/dz at the output layer. Softmax + cross-entropy and
    // sigmoid + squared error both reduce to simple forms.
    std::vector<double> delta(out.size());
    if (net.head == Head::classifier) {
        for (std::size_t i = 0; i < out.size(); ++i) delta[i] = out[i] - target[i];
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) {
            delta[i] = 2.0 * (out[i] - target[i]) * out[i] * (1.0 - out[i]);
        }
    }

    std::vector<Layer> grads(net.layers.size());
    for (std::size_t l = net.layers.size(); l-- > 0;) {
        const Layer& layer = net.layers[l];
        Layer& g = grads[l];
        g.in = layer.in;
        g.out = layer.out;
        g.weights.assign(layer.weights.size(), 0.0);
        g.biases.assign(layer.biases.size(), 0.0);
        const auto& below = acts[l];
        for (std::size_t o = 0; o < layer.out; ++o) {
            g.biases[o] = delta[o];
            for (std::size_t i = 0; i < layer.in; ++i) {
                g.weights[o * layer.in + i] = delta[o] * below[i];
            }
        }
        if (l > 0) {
            std::vector<double> next(layer.in, 0.0);
            for (std::size_t i = 0; i < layer.in; ++i) {
                double sum = 0.0;
                for (std::size_t o = 0; o < layer.out; ++o) {
                    sum += layer.weights[o * layer.in + i] * delta[o];
                }
                next[i] = sum * below[i] * (1.0 - below[i]);
            }
            delta = std::move(next);
        }
    }
    return grads;
}

struct TrainResult {
    Network net;
    std::vector<double> loss_history;  // mean per-sample loss per epoch
};

namespace detail {

struct TrainSample {
    std::vector<double> input;
    std::vector<double> target;
};

inline TrainResult train_impl(Network net, std::vector<TrainSample> samples,
                              const TrainingConfig& cfg) {
    cfg.validate();
    if (samples.empty()) throw std::invalid_argument("train: empty training set");

    TrainResult result;
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t idx : order) {
            const auto& s = samples[idx];
            epoch_loss += sample_loss(net, s.input, s.target);
            const auto grads = loss_gradient(net, s.input, s.target);
            for (std::size_t l = 0; l < net.layers.size(); ++l) {
                auto& layer = net.layers[l];
                const auto& g = grads[l];
                for (std::size_t k = 0; k < layer.weights.size(); ++k) {
                    layer.weights[k] -= cfg.learning_rate * g.weights[k];
                }
                for (std::size_t k = 0; k < layer.biases.size(); ++k) {
                    layer.biases[k] -= cfg.learning_rate * g.biases[k];
                }
            }
        }
        result.loss_history.push_back(epoch_loss / static_cast<double>(samples.size()));
    }
    result.net = std::move(net);
    return result;
}

inline std::vector<double> one_hot(Direction d) {
    std::vector<double> t(3, 0.0);
    t[static_cast<std::size_t>(d)] = 1.0;
    return t;
}

}  // namespace detail

/// Seeded-shuffled per-sample gradient descent on already-scaled regression
/// samples (features and targets in [0, 1]).
inline TrainResult train(Network net, const std::vector<LabeledSample>& samples,
                         const TrainingConfig& cfg) {
    if (net.head != Head::regression) throw std::invalid_argument("train: regression head required");
    std::vector<detail::TrainSample> ts;
    ts.reserve(samples.size());
    for (const auto& s : samples) {
        ts.push_back({{s.features[0], s.features[1]}, {s.target}});
    }
    return detail::train_impl(std::move(net), std::move(ts), cfg);
}

/// Classifier variant: cross-entropy against one-hot direction labels.
inline TrainResult train(Network net, const std::vector<LabeledDirection>& samples,
                         const TrainingConfig& cfg) {
    if (net.head != Head::classifier) throw std::invalid_argument("train: classifier head required");
    std::vector<detail::TrainSample> ts;
    ts.reserve(samples.size());
    for (const auto& s : samples) {
        ts.push_back({{s.features[0], s.features[1]}, detail::one_hot(s.label)});
    }
    return detail::train_impl(std::move(net), std::move(ts), cfg);
}

/// Max relative deviation between the analytic gradient and central finite
/// differences (step 1e-5) over every parameter, for one sample.
inline double gradient_check(const Network& net, const std::vector<double>& input,
                             const std::vector<double>& target) {
    const double h = 1e-5;
    const auto analytic = loss_gradient(net, input, target);
    Network probe = net;
    double worst = 0.0;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const std::size_t nw = net.layers[l].weights.size();
        const std::size_t nb = net.layers[l].biases.size();
        for (std::size_t k = 0; k < nw + nb; ++k) {
            double* p = k < nw ? &probe.layers[l].weights[k] : &probe.layers[l].biases[k - nw];
            const double a =
                k < nw ? analytic[l].weights[k] : analytic[l].biases[k - nw];
            const double saved = *p;
            *p = saved + h;
            const double up = sample_loss(probe, input, target);
            *p = saved - h;
            const double down = sample_loss(probe, input, target);
            *p = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-6});
            worst = std::max(worst, std::fabs(a - numeric) / denom);
        }
    }
    return worst;
}

/// Seeded shuffle then split: first round(n * fraction) samples train, the
/// rest test. Disjoint and exhaustive.
template <typename Sample>
inline std::pair<std::vector<Sample>, std::vector<Sample>> split_samples(
    std::vector<Sample> samples, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("split_samples: fraction must be in (0, 1)");
    }
    if (samples.size() < 2) throw std::invalid_argument("split_samples: need >= 2 samples");
    Rng rng(seed);
    rng.shuffle(samples);
    const auto n_train = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(samples.size())));
    std::vector<Sample> train_set(samples.begin(), samples.begin() + n_train);
    std::vector<Sample> test_set(samples.begin() + n_train, samples.end());
    return {std::move(train_set), std::move(test_set)};
}

/// A trained predictor: network plus the scalers that map raw features into
/// the unit square and the output back to Discomfort units, with the feature
/// extraction settings it was trained under.
struct Model {
    Network net;
    Scaler feature_scaler;       // over (C_w, dC_w)
    Scaler target_scaler;        // over the score deltas (regression head only)
    TrainingConfig training;
    double epsilon = 0.4;
    double window_s = 120.0;
    DeltaMode delta_mode = DeltaMode::ratio;
};

/// Predicted change in Discomfort Score for one window feature, in score
/// units. Features without a defined delta yield no prediction.
inline std::optional<double> predict_delta(const Model& model, const WindowFeature& feature) {
    if (model.net.head != Head::regression) {
        throw std::invalid_argument("predict_delta: regression model required");
    }
    if (!feature.delta.has_value()) return std::nullopt;
    const std::vector<double> scaled = {
        model.feature_scaler.transform_component(0, feature.rate),
        model.feature_scaler.transform_component(1, *feature.delta)};
    const double y = forward(model.net, scaled)[0];
    return model.target_scaler.inverse_component(0, y);
}

struct DirectionPrediction {
    Direction label = Direction::same;
    std::array<double, 3> probabilities{};
};

/// Softmax argmax over {lower, same, higher}; exact ties involving "same"
/// resolve to "same".
inline std::optional<DirectionPrediction> classify_direction(const Model& model,
                                                             const WindowFeature& feature) {
    if (model.net.head != Head::classifier) {
        throw std::invalid_argument("classify_direction: classifier model required");
    }
    if (!feature.delta.has_value()) return std::nullopt;
    const std::vector<double> scaled = {
        model.feature_scaler.transform_component(0, feature.rate),
        model.feature_scaler.transform_component(1, *feature.delta)};
    const auto probs = forward(model.net, scaled);

    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
        if (probs[i] > probs[best]) best = i;
    }
    if (probs[static_cast<std::size_t>(Direction::same)] == probs[best]) {
        best = static_cast<std::size_t>(Direction::same);
    }
    DirectionPrediction pred;
    pred.label = static_cast<Direction>(best);
    pred.probabilities = {probs[0], probs[1], probs[2]};
    return pred;
}

}  // namespace comprate
