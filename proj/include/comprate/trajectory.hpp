#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace comprate {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
    double norm2() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
    double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
};

/// One logged sample: object id, position in Unity Meters, timestamp in seconds.
struct TrajPoint {
    std::string tid;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double t = 0.0;

    Vec3 pos() const { return {x, y, z}; }
};

/// Ordered sample sequence sharing one tid, timestamps strictly increasing.
struct Trajectory {
    std::vector<TrajPoint> points;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    double start_time() const { return points.front().t; }
    double end_time() const { return points.back().t; }
    double duration() const { return empty() ? 0.0 : end_time() - start_time(); }
};

/// A 0-10 integer self-report at time t (seconds).
struct DiscomfortReport {
    double t = 0.0;
    int score = 0;
};

/// One user-session: movement log plus the periodic discomfort reports.
struct SessionLog {
    std::string user;
    Trajectory trajectory;
    std::vector<DiscomfortReport> reports;
    double sample_hz = 2.0;
};

struct ValidationIssue {
    std::size_t index = 0;
    std::string rule;
};

struct ValidationResult {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

/// Checks every Trajectory invariant and itemizes violations instead of throwing.
inline ValidationResult validate_trajectory(const Trajectory& traj) {
    ValidationResult result;
    const auto& pts = traj.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
            !std::isfinite(p.t)) {
            result.issues.push_back({i, "non-finite coordinate or timestamp"});
        }
        if (p.t < 0.0) {
            result.issues.push_back({i, "negative timestamp"});
        }
        if (i > 0) {
            if (!(pts[i - 1].t < p.t)) {
                result.issues.push_back({i, "non-increasing t"});
            }
            if (p.tid != pts[0].tid) {
                result.issues.push_back({i, "tid differs from first point"});
            }
        }
    }
    return result;
}

/// Session-level checks: report invariants plus each report falling inside the
/// trajectory's time span (tolerance of one sampling interval at either end).
inline ValidationResult validate_session(const SessionLog& session) {
    ValidationResult result = validate_trajectory(session.trajectory);
    const auto& reports = session.reports;
    const double tol = session.sample_hz > 0.0 ? 1.0 / session.sample_hz : 0.0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (reports[i].score < 0 || reports[i].score > 10) {
            result.issues.push_back({i, "score outside 0-10"});
        }
        if (i > 0 && !(reports[i - 1].t < reports[i].t)) {
            result.issues.push_back({i, "non-increasing report t"});
        }
        if (!session.trajectory.empty()) {
            const double lo = session.trajectory.start_time() - tol;
            const double hi = session.trajectory.end_time() + tol;
            if (reports[i].t < lo || reports[i].t > hi) {
                result.issues.push_back({i, "report outside trajectory span"});
            }
        }
    }
    return result;
}

/// Maximal sub-trajectory with t0 <= t < t1, order preserved.
inline Trajectory slice_window(const Trajectory& traj, double t0, double t1) {
    if (!(t0 < t1)) {
        throw std::invalid_argument("slice_window: t0 must be < t1");
    }
    Trajectory out;
    for (const auto& p : traj.points) {
        if (p.t >= t0 && p.t < t1) out.points.push_back(p);
    }
    return out;
}

/// Average speed over the segment p->q in Um/s.
inline double speed_between(const TrajPoint& p, const TrajPoint& q) {
    if (!(p.t < q.t)) {
        throw std::invalid_argument("speed_between: p.t must be < q.t");
    }
    return (q.pos() - p.pos()).norm() / (q.t - p.t);
}

}  // namespace comprate
