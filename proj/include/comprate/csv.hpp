#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "comprate/compression.hpp"
#include "comprate/network.hpp"
#include "comprate/trajectory.hpp"

namespace comprate {

/// Malformed input data (bad CSV row, unknown label, misaligned grid, ...).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace csv {

/// Shortest representation that round-trips exactly; keeps every emitted file
/// byte-stable across runs.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view field, std::size_t line_no) {
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw DataError("line " + std::to_string(line_no) + ": bad number '" +
                        std::string(field) + "'");
    }
    return v;
}

inline long parse_long(std::string_view field, std::size_t line_no) {
    long v = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw DataError("line " + std::to_string(line_no) + ": bad integer '" +
                        std::string(field) + "'");
    }
    return v;
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    // tolerate CRLF input
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
        fields.back().pop_back();
    }
    return fields;
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << content;
}

}  // namespace csv

// --- Trajectory CSV: header tid,x,y,z,t -------------------------------------

inline std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out = "tid,x,y,z,t\n";
    for (const auto& p : traj.points) {
        out += p.tid;
        out += ',';
        out += csv::format_double(p.x);
        out += ',';
        out += csv::format_double(p.y);
        out += ',';
        out += csv::format_double(p.z);
        out += ',';
        out += csv::format_double(p.t);
        out += '\n';
    }
    return out;
}

inline Trajectory trajectory_from_csv_lines(const std::vector<std::string>& lines) {
    if (lines.empty() || csv::split(lines[0]) != std::vector<std::string>{"tid", "x", "y", "z", "t"}) {
        throw DataError("trajectory CSV: expected header tid,x,y,z,t");
    }
    Trajectory traj;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = csv::split(lines[i]);
        if (f.size() != 5) {
            throw DataError("line " + std::to_string(i + 1) + ": expected 5 fields");
        }
        traj.points.push_back({f[0], csv::parse_double(f[1], i + 1), csv::parse_double(f[2], i + 1),
                               csv::parse_double(f[3], i + 1), csv::parse_double(f[4], i + 1)});
    }
    const auto verdict = validate_trajectory(traj);
    if (!verdict.ok()) {
        throw DataError("trajectory CSV: " + verdict.issues.front().rule + " at point index " +
                        std::to_string(verdict.issues.front().index));
    }
    return traj;
}

inline Trajectory load_trajectory_csv(const std::string& path) {
    return trajectory_from_csv_lines(csv::read_lines(path));
}

// --- Discomfort CSV: header t,score ------------------------------------------

inline std::string reports_to_csv(const std::vector<DiscomfortReport>& reports) {
    std::string out = "t,score\n";
    for (const auto& r : reports) {
        out += csv::format_double(r.t);
        out += ',';
        out += std::to_string(r.score);
        out += '\n';
    }
    return out;
}

inline std::vector<DiscomfortReport> load_reports_csv(const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty() || csv::split(lines[0]) != std::vector<std::string>{"t", "score"}) {
        throw DataError("discomfort CSV: expected header t,score");
    }
    std::vector<DiscomfortReport> reports;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = csv::split(lines[i]);
        if (f.size() != 2) {
            throw DataError("line " + std::to_string(i + 1) + ": expected 2 fields");
        }
        const long score = csv::parse_long(f[1], i + 1);
        if (score < 0 || score > 10) {
            throw DataError("line " + std::to_string(i + 1) + ": score outside 0-10");
        }
        reports.push_back({csv::parse_double(f[0], i + 1), static_cast<int>(score)});
    }
    for (std::size_t i = 1; i < reports.size(); ++i) {
        if (!(reports[i - 1].t < reports[i].t)) {
            throw DataError("discomfort CSV: non-increasing t at row " + std::to_string(i + 1));
        }
    }
    return reports;
}

// --- Window feature CSV: header window,t0,t1,rate,delta,points ---------------

inline std::string feature_row(const WindowFeature& f) {
    std::string out = std::to_string(f.window_index);
    out += ',';
    out += csv::format_double(f.t0);
    out += ',';
    out += csv::format_double(f.t1);
    out += ',';
    out += csv::format_double(f.rate);
    out += ',';
    if (f.delta) out += csv::format_double(*f.delta);
    out += ',';
    out += std::to_string(f.point_count);
    return out;
}

inline std::string features_to_csv(const std::vector<WindowFeature>& features) {
    std::string out = "window,t0,t1,rate,delta,points\n";
    for (const auto& f : features) {
        out += feature_row(f);
        out += '\n';
    }
    return out;
}

/// JSONL mirror of the feature CSV: one object per window, undefined deltas
/// as null.
inline std::string features_to_jsonl(const std::vector<WindowFeature>& features) {
    std::string out;
    for (const auto& f : features) {
        nlohmann::json j{{"window", f.window_index}, {"t0", f.t0},        {"t1", f.t1},
                         {"rate", f.rate},           {"delta", nullptr},  {"points", f.point_count}};
        if (f.delta) j["delta"] = *f.delta;
        out += j.dump();
        out += '\n';
    }
    return out;
}

/// Single-line JSON form of a compression result.
inline std::string compression_result_to_jsonl(const CompressionResult& result) {
    const nlohmann::json j{{"kept", result.kept},
                           {"removed", result.removed_count},
                           {"total", result.total_count}};
    return j.dump() + "\n";
}

inline std::vector<WindowFeature> load_features_csv(const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty() ||
        csv::split(lines[0]) !=
            std::vector<std::string>{"window", "t0", "t1", "rate", "delta", "points"}) {
        throw DataError("feature CSV: expected header window,t0,t1,rate,delta,points");
    }
    std::vector<WindowFeature> features;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = csv::split(lines[i]);
        if (f.size() != 6) {
            throw DataError("line " + std::to_string(i + 1) + ": expected 6 fields");
        }
        WindowFeature w;
        w.window_index = static_cast<std::size_t>(csv::parse_long(f[0], i + 1));
        w.t0 = csv::parse_double(f[1], i + 1);
        w.t1 = csv::parse_double(f[2], i + 1);
        w.rate = csv::parse_double(f[3], i + 1);
        if (!f[4].empty()) w.delta = csv::parse_double(f[4], i + 1);
        w.point_count = static_cast<std::size_t>(csv::parse_long(f[5], i + 1));
        features.push_back(w);
    }
    return features;
}

// --- Prediction CSV: header t,delta,score ------------------------------------

struct PredictedPoint {
    double t = 0.0;
    std::optional<double> delta;  // empty for windows without a defined dC
    double score = 0.0;           // reconstructed cumulative score
};

inline std::string predictions_to_csv(const std::vector<PredictedPoint>& rows) {
    std::string out = "t,delta,score\n";
    for (const auto& r : rows) {
        out += csv::format_double(r.t);
        out += ',';
        if (r.delta) out += csv::format_double(*r.delta);
        out += ',';
        out += csv::format_double(r.score);
        out += '\n';
    }
    return out;
}

// --- Generic score / label curves for evaluation ------------------------------

struct ScoreCurve {
    std::vector<double> times;
    std::vector<double> scores;
};

/// Reads any CSV carrying `t` plus a `score` column (extra columns ignored),
/// e.g. discomfort files and prediction files alike.
inline ScoreCurve load_score_curve(const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw DataError(path + ": empty file");
    const auto header = csv::split(lines[0]);
    std::size_t t_col = header.size(), s_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "t") t_col = c;
        if (header[c] == "score") s_col = c;
    }
    if (t_col == header.size() || s_col == header.size()) {
        throw DataError(path + ": expected columns t and score");
    }
    ScoreCurve curve;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = csv::split(lines[i]);
        if (f.size() != header.size()) {
            throw DataError("line " + std::to_string(i + 1) + ": field count mismatch");
        }
        curve.times.push_back(csv::parse_double(f[t_col], i + 1));
        curve.scores.push_back(csv::parse_double(f[s_col], i + 1));
    }
    return curve;
}

inline bool has_label_column(const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) return false;
    const auto header = csv::split(lines[0]);
    for (const auto& h : header) {
        if (h == "label") return true;
    }
    return false;
}

/// Reads a `t,label` CSV with labels in {lower, same, higher}.
inline std::vector<Direction> load_label_csv(const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw DataError(path + ": empty file");
    const auto header = csv::split(lines[0]);
    std::size_t col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "label") col = c;
    }
    if (col == header.size()) throw DataError(path + ": expected a label column");
    std::vector<Direction> labels;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = csv::split(lines[i]);
        if (f.size() != header.size()) {
            throw DataError("line " + std::to_string(i + 1) + ": field count mismatch");
        }
        const auto d = direction_from_name(f[col]);
        if (!d) {
            throw DataError("line " + std::to_string(i + 1) + ": unknown label '" + f[col] + "'");
        }
        labels.push_back(*d);
    }
    return labels;
}

}  // namespace comprate
