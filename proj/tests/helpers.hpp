#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "comprate/rng.hpp"
#include "comprate/trajectory.hpp"

namespace testutil {

inline comprate::TrajPoint pt(double x, double y, double z, double t,
                              const std::string& tid = "t") {
    return {tid, x, y, z, t};
}

/// Straight constant-velocity line along +x, n points, dt apart.
inline comprate::Trajectory straight_line(std::size_t n, double speed = 2.0, double dt = 0.5) {
    comprate::Trajectory traj;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        traj.points.push_back(pt(speed * t, 0.0, 0.0, t));
    }
    return traj;
}

/// Seeded random walk in 3D with uniform steps; timestamps 0, 1, 2, ...
inline comprate::Trajectory random_walk(std::size_t n, std::uint64_t seed, double step = 1.0) {
    comprate::Rng rng(seed);
    comprate::Trajectory traj;
    double x = 0.0, y = 0.0, z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        traj.points.push_back(pt(x, y, z, static_cast<double>(i)));
        x += rng.uniform(-step, step);
        y += rng.uniform(-step, step);
        z += rng.uniform(-step, step);
    }
    return traj;
}

// -----------------------------------------------------------------------------
// Independent reference implementations. These transcribe the algorithm rules
// directly and stay separate from the library code paths they check.
// -----------------------------------------------------------------------------

/// Opening-window scan, written as a literal rule transcription: keep a pair
/// (a, b); each candidate point c is compared against the position
/// extrapolated from a through b at time c.t; under the threshold b is marked
/// removable and b <- c, otherwise (a, b) <- (b, c). Kept = never marked.
inline std::vector<std::size_t> stc_reference_kept(const comprate::Trajectory& traj,
                                                   double epsilon) {
    const auto& p = traj.points;
    std::vector<bool> removable(p.size(), false);
    std::size_t a = 0;
    std::size_t b = 1;
    for (std::size_t c = 2; c < p.size(); ++c) {
        const double s = (p[c].t - p[a].t) / (p[b].t - p[a].t);
        const double px = p[a].x + s * (p[b].x - p[a].x);
        const double py = p[a].y + s * (p[b].y - p[a].y);
        const double pz = p[a].z + s * (p[b].z - p[a].z);
        const double dx = px - p[c].x;
        const double dy = py - p[c].y;
        const double dz = pz - p[c].z;
        const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (dist < epsilon) {
            removable[b] = true;
            b = c;
        } else {
            a = b;
            b = c;
        }
    }
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!removable[i]) kept.push_back(i);
    }
    return kept;
}

/// Naive recursive Douglas-Peucker with its own distance code: squared
/// point-to-segment distance, split at the first index attaining the strict
/// maximum, eliminate the gap when the max distance stays under epsilon.
inline double dp_ref_dist2(const comprate::TrajPoint& c, const comprate::TrajPoint& a,
                           const comprate::TrajPoint& b) {
    const double abx = b.x - a.x, aby = b.y - a.y, abz = b.z - a.z;
    const double acx = c.x - a.x, acy = c.y - a.y, acz = c.z - a.z;
    const double len2 = abx * abx + aby * aby + abz * abz;
    double s = 0.0;
    if (len2 > 0.0) s = (acx * abx + acy * aby + acz * abz) / len2;
    if (s < 0.0) s = 0.0;
    if (s > 1.0) s = 1.0;
    const double dx = acx - s * abx, dy = acy - s * aby, dz = acz - s * abz;
    return dx * dx + dy * dy + dz * dz;
}

inline void dp_reference_recurse(const comprate::Trajectory& traj, std::size_t lo, std::size_t hi,
                                 double eps2, std::vector<bool>& keep) {
    if (hi <= lo + 1) return;
    double best = -1.0;
    std::size_t split = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
        const double d2 = dp_ref_dist2(traj.points[i], traj.points[lo], traj.points[hi]);
        if (d2 > best) {
            best = d2;
            split = i;
        }
    }
    if (best < eps2) return;
    keep[split] = true;
    dp_reference_recurse(traj, lo, split, eps2, keep);
    dp_reference_recurse(traj, split, hi, eps2, keep);
}

inline std::vector<std::size_t> dp_reference_kept(const comprate::Trajectory& traj,
                                                  double epsilon) {
    std::vector<bool> keep(traj.size(), false);
    keep.front() = true;
    keep.back() = true;
    dp_reference_recurse(traj, 0, traj.size() - 1, epsilon * epsilon, keep);
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i]) kept.push_back(i);
    }
    return kept;
}

}  // namespace testutil
