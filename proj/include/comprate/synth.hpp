#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "comprate/rng.hpp"
#include "comprate/trajectory.hpp"

namespace comprate {

enum class CourseKind { maze, race };

/// Parameters for the deterministic course generators. Maze courses move at a
/// fixed speed through right-angle turns; race courses weave around obstacles
/// with joystick-controlled speed.
struct CourseSpec {
    CourseKind kind = CourseKind::maze;
    double duration_s = 600.0;
    double sample_hz = 2.0;
    std::uint64_t seed = 1;

    // maze
    double speed = 2.0;           // constant Um/s
    int turn_count = 40;          // 90-degree turns
    double turn_duration_s = 0.5; // finite turn time so mid-turn samples exist

    // race
    double speed_min = 0.5;
    double speed_max = 10.0;
    double obstacle_density = 5.0;  // weaves per 100 Um travelled

    void validate() const {
        if (!(duration_s > 0.0)) throw std::invalid_argument("CourseSpec: duration_s must be > 0");
        if (!(sample_hz > 0.0)) throw std::invalid_argument("CourseSpec: sample_hz must be > 0");
        if (kind == CourseKind::maze) {
            if (turn_count < 0) throw std::invalid_argument("CourseSpec: turn_count must be >= 0");
            if (!(speed > 0.0)) throw std::invalid_argument("CourseSpec: speed must be > 0");
            if (!(turn_duration_s > 0.0)) {
                throw std::invalid_argument("CourseSpec: turn_duration_s must be > 0");
            }
        } else {
            if (!(speed_min >= 0.0 && speed_min <= speed_max && speed_max <= 10.0)) {
                throw std::invalid_argument("CourseSpec: race speed must satisfy 0 <= min <= max <= 10");
            }
            if (obstacle_density < 0.0) {
                throw std::invalid_argument("CourseSpec: obstacle_density must be >= 0");
            }
        }
    }
};

/// Synthetic ground-truth sickness model: accumulated heading change and speed
/// variance push the score up, smooth movement lets it decay. Purely a test
/// stand-in for human reports; gains are free parameters.
struct SicknessModel {
    double turn_gain = 0.25;     // discomfort per radian of heading change per window
    double speed_gain = 0.02;    // discomfort per (Um/s)^2 of speed variance
    double noise_sd = 0.05;
    double recovery_rate = 0.4;  // score decay per window when movement is smooth
    std::uint64_t seed = 1;
};

namespace detail {

struct Phase {
    double t_start = 0.0;
    double duration = 0.0;
    Vec3 pos0;
    double heading0 = 0.0;
    double omega = 0.0;  // 0 for straight phases

    Vec3 at(double tau, double speed) const {
        if (omega == 0.0) {
            return pos0 + (speed * tau) * Vec3{std::cos(heading0), std::sin(heading0), 0.0};
        }
        const double r = speed / omega;
        const double h = heading0 + omega * tau;
        return pos0 + Vec3{r * (std::sin(h) - std::sin(heading0)),
                           r * (std::cos(heading0) - std::cos(h)), 0.0};
    }
};

// Heavily spread segment durations: a floor per segment plus a share of the
// remaining budget weighted by u^3, so turn density varies window to window.
inline std::vector<double> segment_durations(Rng& rng, int segments, double budget,
                                             double min_len) {
    std::vector<double> weights(static_cast<std::size_t>(segments));
    double total = 0.0;
    for (auto& w : weights) {
        const double u = rng.uniform();
        w = u * u * u + 1e-3;
        total += w;
    }
    std::vector<double> durations(weights.size());
    const double spare = budget - min_len * static_cast<double>(segments);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        durations[i] = min_len + spare * (weights[i] / total);
    }
    return durations;
}

}  // namespace detail

/// Piecewise-straight course at constant speed joined by 90-degree turns of
/// finite duration, sampled at sample_hz. Deterministic per seed.
inline Trajectory gen_maze_trajectory(const CourseSpec& spec) {
    spec.validate();
    if (spec.kind != CourseKind::maze) {
        throw std::invalid_argument("gen_maze_trajectory: spec.kind must be maze");
    }
    // Three sample intervals per straight segment guarantee two fully straight
    // inter-sample intervals between turns, keeping turn events distinct in
    // the sampled heading sequence.
    const double min_seg = 3.0 / spec.sample_hz;
    const int turns = spec.turn_count;
    const double straight_budget = spec.duration_s - spec.turn_duration_s * turns;
    if (straight_budget < min_seg * (turns + 1)) {
        throw std::invalid_argument("gen_maze_trajectory: duration too short for turn_count");
    }

    Rng rng(spec.seed);
    const auto segs = detail::segment_durations(rng, turns + 1, straight_budget, min_seg);

    std::vector<detail::Phase> phases;
    double t = 0.0;
    Vec3 pos{0.0, 0.0, 0.0};
    double heading = 0.0;
    for (int k = 0; k <= turns; ++k) {
        detail::Phase straight{t, segs[static_cast<std::size_t>(k)], pos, heading, 0.0};
        phases.push_back(straight);
        t += straight.duration;
        pos = straight.at(straight.duration, spec.speed);
        if (k < turns) {
            const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
            const double omega = sign * (3.14159265358979323846 / 2.0) / spec.turn_duration_s;
            detail::Phase turn{t, spec.turn_duration_s, pos, heading, omega};
            phases.push_back(turn);
            t += turn.duration;
            pos = turn.at(turn.duration, spec.speed);
            heading += omega * turn.duration;
        }
    }

    Trajectory traj;
    const std::string tid = "maze-" + std::to_string(spec.seed);
    const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_hz));
    std::size_t phase_idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = static_cast<double>(i) / spec.sample_hz;
        while (phase_idx + 1 < phases.size() &&
               ti >= phases[phase_idx].t_start + phases[phase_idx].duration) {
            ++phase_idx;
        }
        const Vec3 p = phases[phase_idx].at(ti - phases[phase_idx].t_start, spec.speed);
        traj.points.push_back({tid, p.x, p.y, p.z, ti});
    }
    return traj;
}

/// Forward course with seeded smooth lateral weaves and speed variation,
/// integrated at the sample interval. Deterministic per seed.
inline Trajectory gen_race_trajectory(const CourseSpec& spec) {
    spec.validate();
    if (spec.kind != CourseKind::race) {
        throw std::invalid_argument("gen_race_trajectory: spec.kind must be race");
    }

    Rng rng(spec.seed);
    const double weave_amp = 0.5;  // rad; many small heading changes, never a U-turn
    const double phase0 = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    const double f1 = rng.uniform(0.015, 0.05);
    const double f2 = rng.uniform(0.05, 0.12);
    const double p1 = rng.uniform(0.0, 6.28318530717958647692);
    const double p2 = rng.uniform(0.0, 6.28318530717958647692);

    const double mid = 0.5 * (spec.speed_min + spec.speed_max);
    const double amp = 0.55 * (spec.speed_max - spec.speed_min);

    Trajectory traj;
    const std::string tid = "race-" + std::to_string(spec.seed);
    const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_hz));
    const double dt = 1.0 / spec.sample_hz;
    const double two_pi = 6.28318530717958647692;

    Vec3 pos{0.0, 0.0, 0.0};
    double arc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = static_cast<double>(i) / spec.sample_hz;
        traj.points.push_back({tid, pos.x, pos.y, pos.z, ti});
        double v = mid + amp * (0.6 * std::sin(two_pi * f1 * ti + p1) +
                                0.4 * std::sin(two_pi * f2 * ti + p2));
        v = std::clamp(v, spec.speed_min, spec.speed_max);
        const double heading =
            weave_amp * std::sin(two_pi * arc * spec.obstacle_density / 100.0 + phase0);
        pos = pos + (v * dt) * Vec3{std::cos(heading), std::sin(heading), 0.0};
        arc += v * dt;
    }
    return traj;
}

/// Windowed synthetic discomfort: per window the score moves by
/// turn_gain * sum|heading change| + speed_gain * speed variance - recovery,
/// plus Gaussian noise, clamped to [0, 10]. Reports are the rounded cumulative
/// score, one at the trajectory start and one at each window boundary.
inline std::vector<DiscomfortReport> gen_discomfort(const Trajectory& traj,
                                                    const SicknessModel& model,
                                                    double window_s) {
    if (!(window_s > 0.0)) throw std::invalid_argument("gen_discomfort: window_s must be > 0");
    if (traj.size() < 2) throw std::invalid_argument("gen_discomfort: need at least 2 points");

    const auto& pts = traj.points;
    const double t_first = traj.start_time();
    // Same grid rule as windowed_features: windows exist while their start
    // does not pass the final sample.
    std::size_t window_count = 1;
    while (t_first + static_cast<double>(window_count) * window_s <= traj.end_time()) {
        ++window_count;
    }

    // Per-window accumulated |heading change| and segment speeds, each
    // displacement attributed to the window of its starting sample.
    std::vector<double> turn_sum(window_count, 0.0);
    std::vector<std::vector<double>> speeds(window_count);
    bool have_heading = false;
    double prev_heading = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Vec3 d = pts[i + 1].pos() - pts[i].pos();
        auto w = static_cast<std::size_t>((pts[i].t - t_first) / window_s);
        if (w >= window_count) w = window_count - 1;
        speeds[w].push_back(speed_between(pts[i], pts[i + 1]));
        if (d.norm2() > 0.0) {
            const double h = std::atan2(d.y, d.x);
            if (have_heading) {
                double dh = std::fabs(h - prev_heading);
                if (dh > 3.14159265358979323846) dh = 2.0 * 3.14159265358979323846 - dh;
                turn_sum[w] += dh;
            }
            prev_heading = h;
            have_heading = true;
        }
    }

    Rng rng(model.seed);
    std::vector<DiscomfortReport> reports;
    double score = 0.0;
    reports.push_back({t_first, static_cast<int>(std::lround(score))});
    for (std::size_t w = 0; w < window_count; ++w) {
        double var = 0.0;
        if (!speeds[w].empty()) {
            double mean = 0.0;
            for (double s : speeds[w]) mean += s;
            mean /= static_cast<double>(speeds[w].size());
            for (double s : speeds[w]) var += (s - mean) * (s - mean);
            var /= static_cast<double>(speeds[w].size());
        }
        const double noise = model.noise_sd > 0.0 ? model.noise_sd * rng.normal() : 0.0;
        const double delta = model.turn_gain * turn_sum[w] + model.speed_gain * var -
                             model.recovery_rate + noise;
        score = std::clamp(score + delta, 0.0, 10.0);
        reports.push_back({t_first + static_cast<double>(w + 1) * window_s,
                           static_cast<int>(std::lround(score))});
    }
    return reports;
}

// --- JSON form of the generator config, consumed by the CLI gen command ---

inline void to_json(nlohmann::json& j, const CourseSpec& spec) {
    j = nlohmann::json{{"kind", spec.kind == CourseKind::maze ? "maze" : "race"},
                       {"duration_s", spec.duration_s},
                       {"sample_hz", spec.sample_hz},
                       {"seed", spec.seed}};
    if (spec.kind == CourseKind::maze) {
        j["speed"] = spec.speed;
        j["turn_count"] = spec.turn_count;
        j["turn_duration_s"] = spec.turn_duration_s;
    } else {
        j["speed_min"] = spec.speed_min;
        j["speed_max"] = spec.speed_max;
        j["obstacle_density"] = spec.obstacle_density;
    }
}

inline void from_json(const nlohmann::json& j, CourseSpec& spec) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "maze") {
        spec.kind = CourseKind::maze;
    } else if (kind == "race") {
        spec.kind = CourseKind::race;
    } else {
        throw std::invalid_argument("CourseSpec: kind must be \"maze\" or \"race\"");
    }
    spec.duration_s = j.value("duration_s", spec.duration_s);
    spec.sample_hz = j.value("sample_hz", spec.sample_hz);
    spec.seed = j.value("seed", spec.seed);
    spec.speed = j.value("speed", spec.speed);
    spec.turn_count = j.value("turn_count", spec.turn_count);
    spec.turn_duration_s = j.value("turn_duration_s", spec.turn_duration_s);
    spec.speed_min = j.value("speed_min", spec.speed_min);
    spec.speed_max = j.value("speed_max", spec.speed_max);
    spec.obstacle_density = j.value("obstacle_density", spec.obstacle_density);
}

inline void to_json(nlohmann::json& j, const SicknessModel& m) {
    j = nlohmann::json{{"turn_gain", m.turn_gain},
                       {"speed_gain", m.speed_gain},
                       {"noise_sd", m.noise_sd},
                       {"recovery_rate", m.recovery_rate},
                       {"seed", m.seed}};
}

inline void from_json(const nlohmann::json& j, SicknessModel& m) {
    m.turn_gain = j.value("turn_gain", m.turn_gain);
    m.speed_gain = j.value("speed_gain", m.speed_gain);
    m.noise_sd = j.value("noise_sd", m.noise_sd);
    m.recovery_rate = j.value("recovery_rate", m.recovery_rate);
    m.seed = j.value("seed", m.seed);
}

}  // namespace comprate
