#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "comprate/network.hpp"

namespace comprate {

/// Reported and predicted score curves over a shared time axis.
struct CurvePair {
    std::vector<double> times;
    std::vector<double> reported;
    std::vector<double> predicted;

    void validate() const {
        if (times.size() != reported.size() || times.size() != predicted.size()) {
            throw std::invalid_argument("CurvePair: length mismatch");
        }
        if (times.size() < 2) throw std::invalid_argument("CurvePair: need >= 2 points");
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (!(times[i - 1] < times[i])) {
                throw std::invalid_argument("CurvePair: times must be strictly increasing");
            }
        }
    }
};

namespace detail {

// Fractional ranks with average-rank tie handling (1-based).
inline std::vector<double> fractional_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace detail

/// Product-moment correlation. Empty optional when either input has zero
/// variance (the coefficient is undefined there).
inline std::optional<double> pearson(const std::vector<double>& xs,
                                     const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
    if (xs.size() < 3) throw std::invalid_argument("pearson: need >= 3 points");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

/// Spearman's rho: Pearson correlation of fractional ranks, average ranks on
/// ties. Undefined when either side is constant.
inline std::optional<double> spearman(const std::vector<double>& xs,
                                      const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("spearman: length mismatch");
    if (xs.size() < 3) throw std::invalid_argument("spearman: need >= 3 points");
    return pearson(detail::fractional_ranks(xs), detail::fractional_ranks(ys));
}

/// Difference-between-curves error: the trapezoidal integral of
/// |reported - predicted| over time divided by the trapezoidal integral of the
/// reported curve.
inline double curve_area_error(const CurvePair& pair) {
    pair.validate();
    double diff_area = 0.0;
    double reported_area = 0.0;
    for (std::size_t i = 0; i + 1 < pair.times.size(); ++i) {
        const double dt = pair.times[i + 1] - pair.times[i];
        diff_area += 0.5 * dt * (std::fabs(pair.reported[i] - pair.predicted[i]) +
                                 std::fabs(pair.reported[i + 1] - pair.predicted[i + 1]));
        reported_area += 0.5 * dt * (pair.reported[i] + pair.reported[i + 1]);
    }
    if (!(reported_area > 0.0)) {
        throw std::invalid_argument("curve_area_error: reported area must be > 0");
    }
    return diff_area / reported_area;
}

/// Mean of predicted - reported (signed) and of |predicted - reported|.
struct PointDiff {
    double mean_signed = 0.0;
    double mean_abs = 0.0;
};

inline PointDiff point_diff(const CurvePair& pair) {
    pair.validate();
    PointDiff d;
    for (std::size_t i = 0; i < pair.times.size(); ++i) {
        const double delta = pair.predicted[i] - pair.reported[i];
        d.mean_signed += delta;
        d.mean_abs += std::fabs(delta);
    }
    d.mean_signed /= static_cast<double>(pair.times.size());
    d.mean_abs /= static_cast<double>(pair.times.size());
    return d;
}

/// 3x3 confusion counts indexed (actual, predicted) over {lower, same, higher}.
struct ConfusionMatrix {
    std::array<std::array<std::size_t, 3>, 3> counts{};

    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& row : counts)
            for (std::size_t c : row) n += c;
        return n;
    }

    std::size_t row_total(Direction actual) const {
        std::size_t n = 0;
        for (std::size_t c : counts[static_cast<std::size_t>(actual)]) n += c;
        return n;
    }

    /// Row-normalized diagonal; empty for classes with no samples.
    std::optional<double> class_accuracy(Direction actual) const {
        const std::size_t n = row_total(actual);
        if (n == 0) return std::nullopt;
        const auto i = static_cast<std::size_t>(actual);
        return static_cast<double>(counts[i][i]) / static_cast<double>(n);
    }

    double global_accuracy() const {
        const std::size_t n = total();
        if (n == 0) throw std::invalid_argument("ConfusionMatrix: no samples");
        std::size_t diag = 0;
        for (std::size_t i = 0; i < 3; ++i) diag += counts[i][i];
        return static_cast<double>(diag) / static_cast<double>(n);
    }
};

inline ConfusionMatrix confusion(const std::vector<Direction>& labels,
                                 const std::vector<Direction>& predictions) {
    if (labels.size() != predictions.size()) {
        throw std::invalid_argument("confusion: length mismatch");
    }
    if (labels.empty()) throw std::invalid_argument("confusion: need >= 1 sample");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        m.counts[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(predictions[i])]++;
    }
    return m;
}

// --- JSON report -----------------------------------------------------------

inline nlohmann::json confusion_to_json(const ConfusionMatrix& m) {
    nlohmann::json j;
    j["counts"] = m.counts;
    nlohmann::json per_class;
    for (Direction d : {Direction::lower, Direction::same, Direction::higher}) {
        const auto acc = m.class_accuracy(d);
        per_class[direction_name(d)] = acc ? nlohmann::json(*acc) : nlohmann::json(nullptr);
    }
    j["per_class_accuracy"] = per_class;
    j["global_accuracy"] = m.global_accuracy();
    return j;
}

/// Full metrics report for a reported/predicted curve pair. Undefined
/// correlations (constant input) serialize as null.
inline nlohmann::json curve_metrics_json(const CurvePair& pair,
                                         const std::optional<ConfusionMatrix>& matrix) {
    pair.validate();
    const bool enough = pair.times.size() >= 3;
    const auto rho = enough ? spearman(pair.reported, pair.predicted) : std::nullopt;
    const auto r = enough ? pearson(pair.reported, pair.predicted) : std::nullopt;
    const auto diffs = point_diff(pair);
    nlohmann::json j;
    j["spearman"] = rho ? nlohmann::json(*rho) : nlohmann::json(nullptr);
    j["pearson"] = r ? nlohmann::json(*r) : nlohmann::json(nullptr);
    j["area_error"] = curve_area_error(pair);
    j["mean_abs_point_diff"] = diffs.mean_abs;
    j["mean_signed_point_diff"] = diffs.mean_signed;
    if (matrix) j["confusion"] = confusion_to_json(*matrix);
    return j;
}

}  // namespace comprate
