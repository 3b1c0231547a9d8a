#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "comprate/trajectory.hpp"

namespace comprate {

enum class DeltaMode { ratio, difference };

struct CompressionConfig {
    double epsilon = 0.4;  // threshold in Um between predicted and actual position
    DeltaMode delta_mode = DeltaMode::ratio;

    void validate() const {
        if (!(epsilon > 0.0)) {
            throw std::invalid_argument("CompressionConfig: epsilon must be > 0");
        }
    }
};

/// Kept/removed partition of one compressed trajectory (or window).
struct CompressionResult {
    std::vector<std::size_t> kept;  // strictly increasing indices into the input
    std::size_t removed_count = 0;
    std::size_t total_count = 0;
};

/// Per-window compression-rate feature: the rate C_w plus its change from the
/// previous window. delta is empty for the first window, and in ratio mode
/// whenever the previous window's rate was zero.
struct WindowFeature {
    std::size_t window_index = 0;
    double t0 = 0.0;
    double t1 = 0.0;
    double rate = 0.0;
    std::optional<double> delta;
    std::size_t point_count = 0;
};

/// Constant-velocity extrapolation along anchor->last evaluated at time t.
inline Vec3 predict_position(const TrajPoint& anchor, const TrajPoint& last, double t) {
    if (!(anchor.t < last.t)) {
        throw std::invalid_argument("predict_position: anchor.t must be < last.t");
    }
    if (!(last.t <= t)) {
        throw std::invalid_argument("predict_position: t must be >= last.t");
    }
    const double s = (t - anchor.t) / (last.t - anchor.t);
    return anchor.pos() + s * (last.pos() - anchor.pos());
}

/// Opening-window spatiotemporal compression.
///
/// Scans with a pair (anchor, last). Each candidate is checked against the
/// position extrapolated from the pair at the candidate's timestamp: when the
/// error is under epsilon the current last point is redundant and the candidate
/// takes its place; otherwise the pair reopens from the last point. Points at
/// speed or direction changes therefore survive, straight constant-speed runs
/// collapse to their endpoints.
inline CompressionResult stc_compress(const Trajectory& traj, const CompressionConfig& cfg) {
    cfg.validate();
    const auto& pts = traj.points;
    if (pts.size() < 2) {
        throw std::invalid_argument("stc_compress: need at least 2 points");
    }

    std::vector<bool> removable(pts.size(), false);
    std::size_t anchor = 0;
    std::size_t last = 1;
    for (std::size_t cand = 2; cand < pts.size(); ++cand) {
        const Vec3 predicted = predict_position(pts[anchor], pts[last], pts[cand].t);
        const double err = (predicted - pts[cand].pos()).norm();
        if (err < cfg.epsilon) {
            removable[last] = true;
            last = cand;
        } else {
            anchor = last;
            last = cand;
        }
    }

    CompressionResult result;
    result.total_count = pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!removable[i]) result.kept.push_back(i);
    }
    result.removed_count = result.total_count - result.kept.size();
    return result;
}

namespace detail {

// Squared perpendicular distance from point c to segment a-b (3D, time
// ignored). The cross-product form keeps the arithmetic exact for small
// integer coordinates, so split decisions on grid inputs have no rounding
// ambiguity.
inline double point_segment_dist2(Vec3 c, Vec3 a, Vec3 b) {
    const Vec3 ab = b - a;
    const Vec3 ac = c - a;
    const double len2 = ab.norm2();
    if (len2 == 0.0) return ac.norm2();
    const double dot = ac.dot(ab);
    if (dot <= 0.0) return ac.norm2();
    if (dot >= len2) return (c - b).norm2();
    return (ac.norm2() * len2 - dot * dot) / len2;
}

inline void dp_recurse(const std::vector<TrajPoint>& pts, std::size_t lo, std::size_t hi,
                       double eps2, std::vector<bool>& keep) {
    if (hi <= lo + 1) return;
    double max_d2 = -1.0;
    std::size_t split = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
        const double d2 = point_segment_dist2(pts[i].pos(), pts[lo].pos(), pts[hi].pos());
        if (d2 > max_d2) {
            max_d2 = d2;
            split = i;
        }
    }
    if (max_d2 < eps2) return;  // everything between lo and hi is eliminated
    keep[split] = true;
    dp_recurse(pts, lo, split, eps2, keep);
    dp_recurse(pts, split, hi, eps2, keep);
}

}  // namespace detail

/// Classic recursive Douglas-Peucker over perpendicular point-to-segment
/// distance, endpoints always kept. Spatial only; the temporal coordinate is
/// ignored (baseline for comparison against stc_compress).
inline CompressionResult dp_compress(const Trajectory& traj, const CompressionConfig& cfg) {
    cfg.validate();
    const auto& pts = traj.points;
    if (pts.size() < 2) {
        throw std::invalid_argument("dp_compress: need at least 2 points");
    }

    std::vector<bool> keep(pts.size(), false);
    keep.front() = true;
    keep.back() = true;
    detail::dp_recurse(pts, 0, pts.size() - 1, cfg.epsilon * cfg.epsilon, keep);

    CompressionResult result;
    result.total_count = pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (keep[i]) result.kept.push_back(i);
    }
    result.removed_count = result.total_count - result.kept.size();
    return result;
}

/// C_w = R_w / T_w, the fraction of points eliminated.
inline double compression_rate(const CompressionResult& result) {
    if (result.total_count == 0) {
        throw std::invalid_argument("compression_rate: empty window");
    }
    return static_cast<double>(result.removed_count) / static_cast<double>(result.total_count);
}

/// Change in compression rate between consecutive windows: C_w / C_{w-1} in
/// ratio mode, C_w - C_{w-1} in difference mode. Ratio against a zero
/// previous rate is undefined.
inline std::optional<double> delta_rate(double c_w, double c_prev, DeltaMode mode) {
    if (mode == DeltaMode::ratio) {
        if (c_prev == 0.0) return std::nullopt;
        return c_w / c_prev;
    }
    return c_w - c_prev;
}

/// Partitions [first t, last t] into half-open windows of window_s seconds
/// anchored at the first timestamp and compresses each window independently.
/// Windows with fewer than 2 points get rate 0. The grid runs through the
/// window containing the final sample, so every point lands in exactly one
/// window.
inline std::vector<WindowFeature> windowed_features(const Trajectory& traj, double window_s,
                                                    const CompressionConfig& cfg) {
    cfg.validate();
    if (!(window_s > 0.0)) {
        throw std::invalid_argument("windowed_features: window_s must be > 0");
    }
    std::vector<WindowFeature> features;
    if (traj.empty()) return features;

    const double t_first = traj.start_time();
    const double t_last = traj.end_time();

    double prev_rate = 0.0;
    for (std::size_t w = 0;; ++w) {
        WindowFeature f;
        f.window_index = w;
        f.t0 = t_first + static_cast<double>(w) * window_s;
        f.t1 = t_first + static_cast<double>(w + 1) * window_s;
        if (w > 0 && f.t0 > t_last) break;
        const Trajectory sub = slice_window(traj, f.t0, f.t1);
        f.point_count = sub.size();
        f.rate = sub.size() >= 2 ? compression_rate(stc_compress(sub, cfg)) : 0.0;
        if (w > 0) f.delta = delta_rate(f.rate, prev_rate, cfg.delta_mode);
        prev_rate = f.rate;
        features.push_back(std::move(f));
    }
    return features;
}

}  // namespace comprate
