// comprate: windowed trajectory-compression rates and per-user discomfort
// prediction over (tid,x,y,z,t) movement logs.
//
// Subcommands: gen, compress, features, train, predict, eval, stream.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "comprate/compression.hpp"
#include "comprate/csv.hpp"
#include "comprate/metrics.hpp"
#include "comprate/model_io.hpp"
#include "comprate/network.hpp"
#include "comprate/stream.hpp"
#include "comprate/synth.hpp"
#include "comprate/trajectory.hpp"

namespace {

using namespace comprate;

constexpr double kAlignTolerance = 1e-6;  // seconds, report-to-window matching

DeltaMode parse_delta_mode(const std::string& s) {
    if (s == "ratio") return DeltaMode::ratio;
    if (s == "difference") return DeltaMode::difference;
    throw CLI::ValidationError("--delta-mode", "must be ratio or difference");
}

std::string delta_mode_name(DeltaMode m) {
    return m == DeltaMode::ratio ? "ratio" : "difference";
}

// --- gen ---------------------------------------------------------------------

struct GenOptions {
    std::string spec_path;
    std::string traj_path;
    std::string reports_path;
};

void run_gen(const GenOptions& opt) {
    std::ifstream in(opt.spec_path);
    if (!in) throw DataError("cannot open " + opt.spec_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(opt.spec_path + ": " + e.what());
    }

    CourseSpec spec;
    SicknessModel model;
    double window_s = 120.0;
    try {
        spec = j.get<CourseSpec>();
        model.seed = spec.seed;
        if (j.contains("sickness")) model = j.at("sickness").get<SicknessModel>();
        window_s = j.value("report_window_s", window_s);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(opt.spec_path + ": " + e.what());
    }

    const Trajectory traj = spec.kind == CourseKind::maze ? gen_maze_trajectory(spec)
                                                          : gen_race_trajectory(spec);
    const auto reports = gen_discomfort(traj, model, window_s);

    csv::write_file(opt.traj_path, trajectory_to_csv(traj));
    csv::write_file(opt.reports_path, reports_to_csv(reports));

    std::cout << "gen: kind=" << (spec.kind == CourseKind::maze ? "maze" : "race")
              << " points=" << traj.size()
              << " duration_s=" << csv::format_double(spec.duration_s)
              << " turns=" << (spec.kind == CourseKind::maze ? spec.turn_count : 0)
              << " reports=" << reports.size() << "\n";
}

// --- compress ------------------------------------------------------------------

struct CompressOptions {
    std::string in_path;
    std::string out_path;
    double epsilon = 0.4;
    std::string algo = "stc";
    std::string format = "csv";
};

void run_compress(const CompressOptions& opt) {
    const Trajectory traj = load_trajectory_csv(opt.in_path);
    CompressionConfig cfg;
    cfg.epsilon = opt.epsilon;
    const CompressionResult result =
        opt.algo == "dp" ? dp_compress(traj, cfg) : stc_compress(traj, cfg);

    if (opt.format == "jsonl") {
        csv::write_file(opt.out_path, compression_result_to_jsonl(result));
    } else {
        Trajectory kept;
        for (std::size_t idx : result.kept) kept.points.push_back(traj.points[idx]);
        csv::write_file(opt.out_path, trajectory_to_csv(kept));
    }

    std::cout << "total,removed,rate\n"
              << result.total_count << "," << result.removed_count << ","
              << csv::format_double(compression_rate(result)) << "\n";
}

// --- features ------------------------------------------------------------------

struct FeatureOptions {
    std::string in_path;
    std::string out_path;
    double epsilon = 0.4;
    double window_s = 120.0;
    std::string delta_mode = "ratio";
    std::string format = "csv";
};

void run_features(const FeatureOptions& opt) {
    const Trajectory traj = load_trajectory_csv(opt.in_path);
    CompressionConfig cfg;
    cfg.epsilon = opt.epsilon;
    cfg.delta_mode = parse_delta_mode(opt.delta_mode);
    const auto features = windowed_features(traj, opt.window_s, cfg);
    csv::write_file(opt.out_path, opt.format == "jsonl" ? features_to_jsonl(features)
                                                        : features_to_csv(features));
    std::cout << "features: windows=" << features.size() << "\n";
}

// --- train ---------------------------------------------------------------------

struct TrainOptions {
    std::string features_path;
    std::string reports_path;
    std::string model_path;
    std::string metrics_path;
    std::string head = "regression";
    std::string delta_mode = "ratio";
    double epsilon = 0.4;
    double learning_rate = 0.1;
    int epochs = 2000;
    std::uint64_t seed = 1;
    double split_fraction = 0.7;
    int hidden = 0;  // 0 = per-head default (4 regression, 3 classifier)
};

// Reports must sit on the feature window grid: one at the grid start, one at
// each window end.
void check_alignment(const std::vector<WindowFeature>& features,
                     const std::vector<DiscomfortReport>& reports) {
    if (features.empty()) throw DataError("train: no windows in features file");
    if (reports.size() != features.size() + 1) {
        throw DataError("train: misaligned grids: " + std::to_string(features.size()) +
                        " windows need " + std::to_string(features.size() + 1) + " reports, got " +
                        std::to_string(reports.size()));
    }
    if (std::fabs(reports[0].t - features[0].t0) > kAlignTolerance) {
        throw DataError("train: misaligned grids: first report not at window start");
    }
    for (std::size_t w = 0; w < features.size(); ++w) {
        if (std::fabs(reports[w + 1].t - features[w].t1) > kAlignTolerance) {
            throw DataError("train: misaligned grids: report " + std::to_string(w + 1) +
                            " not at end of window " + std::to_string(w));
        }
    }
}

Direction direction_of(int delta) {
    if (delta < 0) return Direction::lower;
    if (delta > 0) return Direction::higher;
    return Direction::same;
}

void run_train(const TrainOptions& opt) {
    const auto features = load_features_csv(opt.features_path);
    const auto reports = load_reports_csv(opt.reports_path);
    check_alignment(features, reports);

    TrainingConfig cfg;
    cfg.learning_rate = opt.learning_rate;
    cfg.epochs = opt.epochs;
    cfg.seed = opt.seed;
    cfg.split_fraction = opt.split_fraction;
    cfg.validate();

    Model model;
    model.training = cfg;
    model.epsilon = opt.epsilon;
    model.window_s = features[0].t1 - features[0].t0;
    model.delta_mode = parse_delta_mode(opt.delta_mode);

    const Head head = opt.head == "classifier" ? Head::classifier : Head::regression;
    const std::size_t hidden = opt.hidden > 0 ? static_cast<std::size_t>(opt.hidden)
                                              : (head == Head::classifier ? 3 : 4);
    const std::vector<std::size_t> sizes = {2, hidden,
                                            head == Head::classifier ? std::size_t{3} : std::size_t{1}};

    std::size_t n_train = 0, n_test = 0, n_samples = 0;
    double final_train_loss = 0.0, test_loss = 0.0;
    std::optional<double> test_accuracy;

    if (head == Head::regression) {
        std::vector<LabeledSample> samples;
        for (std::size_t w = 0; w < features.size(); ++w) {
            if (!features[w].delta) continue;
            samples.push_back({{features[w].rate, *features[w].delta},
                               static_cast<double>(reports[w + 1].score - reports[w].score)});
        }
        if (samples.size() < 2) throw DataError("train: fewer than 2 usable windows");
        auto [train_set, test_set] = split_samples(samples, cfg.split_fraction, cfg.seed);
        n_samples = samples.size();
        n_train = train_set.size();
        n_test = test_set.size();

        std::vector<std::vector<double>> rows;
        std::vector<std::vector<double>> targets;
        for (const auto& s : train_set) {
            rows.push_back({s.features[0], s.features[1]});
            targets.push_back({s.target});
        }
        model.feature_scaler = Scaler::fit(rows);
        model.target_scaler = Scaler::fit(targets);

        auto scale = [&](const std::vector<LabeledSample>& in) {
            std::vector<LabeledSample> out;
            for (const auto& s : in) {
                out.push_back({{model.feature_scaler.transform_component(0, s.features[0]),
                                model.feature_scaler.transform_component(1, s.features[1])},
                               model.target_scaler.transform_component(0, s.target)});
            }
            return out;
        };
        auto result = train(init_network(sizes, head, cfg.seed), scale(train_set), cfg);
        model.net = std::move(result.net);
        final_train_loss = result.loss_history.back();
        if (!test_set.empty()) {
            for (const auto& s : scale(test_set)) {
                test_loss += sample_loss(model.net, {s.features[0], s.features[1]}, {s.target});
            }
            test_loss /= static_cast<double>(test_set.size());
        }
    } else {
        std::vector<LabeledDirection> samples;
        for (std::size_t w = 0; w < features.size(); ++w) {
            if (!features[w].delta) continue;
            samples.push_back({{features[w].rate, *features[w].delta},
                               direction_of(reports[w + 1].score - reports[w].score)});
        }
        if (samples.size() < 2) throw DataError("train: fewer than 2 usable windows");
        auto [train_set, test_set] = split_samples(samples, cfg.split_fraction, cfg.seed);
        n_samples = samples.size();
        n_train = train_set.size();
        n_test = test_set.size();

        std::vector<std::vector<double>> rows;
        for (const auto& s : train_set) rows.push_back({s.features[0], s.features[1]});
        model.feature_scaler = Scaler::fit(rows);

        auto scale = [&](const std::vector<LabeledDirection>& in) {
            std::vector<LabeledDirection> out;
            for (const auto& s : in) {
                out.push_back({{model.feature_scaler.transform_component(0, s.features[0]),
                                model.feature_scaler.transform_component(1, s.features[1])},
                               s.label});
            }
            return out;
        };
        auto result = train(init_network(sizes, head, cfg.seed), scale(train_set), cfg);
        model.net = std::move(result.net);
        final_train_loss = result.loss_history.back();
        if (!test_set.empty()) {
            std::size_t correct = 0;
            for (const auto& s : scale(test_set)) {
                std::vector<double> target(3, 0.0);
                target[static_cast<std::size_t>(s.label)] = 1.0;
                test_loss += sample_loss(model.net, {s.features[0], s.features[1]}, target);
                const auto out = forward(model.net, {s.features[0], s.features[1]});
                std::size_t best = 0;
                for (std::size_t i = 1; i < 3; ++i) {
                    if (out[i] > out[best]) best = i;
                }
                if (best == static_cast<std::size_t>(s.label)) ++correct;
            }
            test_loss /= static_cast<double>(test_set.size());
            test_accuracy = static_cast<double>(correct) / static_cast<double>(test_set.size());
        }
    }

    save_model(opt.model_path, model);

    nlohmann::json metrics;
    metrics["samples"] = n_samples;
    metrics["train_size"] = n_train;
    metrics["test_size"] = n_test;
    metrics["final_train_loss"] = final_train_loss;
    metrics["test_loss"] = test_loss;
    if (test_accuracy) metrics["test_accuracy"] = *test_accuracy;
    if (!opt.metrics_path.empty()) {
        csv::write_file(opt.metrics_path, metrics.dump(2) + "\n");
    }

    std::cout << "train: samples=" << n_samples << " train=" << n_train << " test=" << n_test
              << " final_train_loss=" << csv::format_double(final_train_loss)
              << " test_loss=" << csv::format_double(test_loss) << "\n";
}

// --- predict -------------------------------------------------------------------

struct PredictOptions {
    std::string model_path;
    std::string in_path;
    std::string out_path;
    double anchor = 0.0;
    std::optional<double> epsilon;
    std::optional<double> window_s;
    std::optional<std::string> delta_mode;
};

void run_predict(const PredictOptions& opt) {
    const Model model = load_model(opt.model_path);
    if (model.net.head != Head::regression) {
        throw DataError("predict: model head is classifier, regression required");
    }
    const Trajectory traj = load_trajectory_csv(opt.in_path);

    CompressionConfig cfg;
    cfg.epsilon = opt.epsilon.value_or(model.epsilon);
    cfg.delta_mode = opt.delta_mode ? parse_delta_mode(*opt.delta_mode) : model.delta_mode;
    const double window_s = opt.window_s.value_or(model.window_s);

    const auto features = windowed_features(traj, window_s, cfg);
    std::vector<PredictedPoint> rows;
    double score = opt.anchor;
    if (!features.empty()) {
        rows.push_back({features[0].t0, std::nullopt, score});
    }
    for (const auto& f : features) {
        const auto delta = predict_delta(model, f);
        if (delta) score += *delta;
        rows.push_back({f.t1, delta, score});
    }
    csv::write_file(opt.out_path, predictions_to_csv(rows));
    std::cout << "predict: windows=" << features.size() << " final_score="
              << csv::format_double(score) << "\n";
}

// --- eval ----------------------------------------------------------------------

struct EvalOptions {
    std::string reported_path;
    std::string predicted_path;
    std::string out_path;
};

std::vector<Direction> curve_directions(const std::vector<double>& scores) {
    std::vector<Direction> out;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        const double d = scores[i] - scores[i - 1];
        out.push_back(d < 0.0 ? Direction::lower : (d > 0.0 ? Direction::higher : Direction::same));
    }
    return out;
}

void run_eval(const EvalOptions& opt) {
    nlohmann::json report;
    if (has_label_column(opt.reported_path) && has_label_column(opt.predicted_path)) {
        const auto actual = load_label_csv(opt.reported_path);
        const auto predicted = load_label_csv(opt.predicted_path);
        if (actual.size() != predicted.size()) {
            throw DataError("eval: length mismatch between label files");
        }
        report["confusion"] = confusion_to_json(confusion(actual, predicted));
    } else {
        const ScoreCurve reported = load_score_curve(opt.reported_path);
        const ScoreCurve predicted = load_score_curve(opt.predicted_path);
        if (reported.times.size() != predicted.times.size()) {
            throw DataError("eval: length mismatch between curves");
        }
        for (std::size_t i = 0; i < reported.times.size(); ++i) {
            if (std::fabs(reported.times[i] - predicted.times[i]) > kAlignTolerance) {
                throw DataError("eval: timestamps not aligned at row " + std::to_string(i + 2));
            }
        }
        CurvePair pair{reported.times, reported.scores, predicted.scores};
        const auto matrix =
            confusion(curve_directions(reported.scores), curve_directions(predicted.scores));
        report = curve_metrics_json(pair, matrix);
    }

    const std::string text = report.dump(2) + "\n";
    std::cout << text;
    if (!opt.out_path.empty()) csv::write_file(opt.out_path, text);
}

// --- stream --------------------------------------------------------------------

struct StreamOptions {
    std::string model_path;
    double epsilon = 0.4;
    double window_s = 120.0;
    std::string delta_mode = "ratio";
    double anchor = 0.0;
    bool epsilon_set = false;
    bool window_set = false;
    bool mode_set = false;
};

void run_stream(const StreamOptions& opt) {
    std::optional<Model> model;
    CompressionConfig cfg;
    cfg.epsilon = opt.epsilon;
    cfg.delta_mode = parse_delta_mode(opt.delta_mode);
    double window_s = opt.window_s;

    if (!opt.model_path.empty()) {
        model = load_model(opt.model_path);
        if (model->net.head != Head::regression) {
            throw DataError("stream: model head is classifier, regression required");
        }
        // model provenance supplies defaults; explicit flags win
        if (!opt.epsilon_set) cfg.epsilon = model->epsilon;
        if (!opt.window_set) window_s = model->window_s;
        if (!opt.mode_set) cfg.delta_mode = model->delta_mode;
    }

    WindowStream stream(window_s, cfg);
    double score = opt.anchor;

    auto emit = [&](const WindowFeature& f) {
        std::cout << f.window_index << ',' << csv::format_double(f.rate) << ',';
        if (f.delta) std::cout << csv::format_double(*f.delta);
        if (model) {
            const auto delta = predict_delta(*model, f);
            if (delta) score += *delta;
            std::cout << ',';
            if (delta) std::cout << csv::format_double(*delta);
            std::cout << ',' << csv::format_double(score);
        }
        std::cout << '\n' << std::flush;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(std::cin, line)) {
        ++line_no;
        if (line.empty()) continue;
        TrajPoint p;
        p.tid = "stream";
        try {
            const auto f = csv::split(line);
            if (f.size() != 4) throw DataError("expected x,y,z,t");
            p.x = csv::parse_double(f[0], line_no);
            p.y = csv::parse_double(f[1], line_no);
            p.z = csv::parse_double(f[2], line_no);
            p.t = csv::parse_double(f[3], line_no);
        } catch (const DataError& e) {
            std::cerr << "error: line " << line_no << ": " << e.what() << "\n";
            continue;
        }
        const auto result = stream.feed(p);
        if (result.rejected) {
            std::cerr << "error: line " << line_no << ": out-of-order timestamp\n";
            continue;
        }
        for (const auto& f : result.closed) emit(f);
    }
    for (const auto& f : stream.finish()) emit(f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Windowed trajectory-compression rates and discomfort prediction"};
    app.require_subcommand(1);
    app.set_config("--config");

    GenOptions gen_opt;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic session (trajectory + reports)");
    gen->add_option("--spec", gen_opt.spec_path, "Course spec JSON")->required();
    gen->add_option("--traj", gen_opt.traj_path, "Output trajectory CSV")->required();
    gen->add_option("--reports", gen_opt.reports_path, "Output discomfort CSV")->required();

    CompressOptions comp_opt;
    auto* comp = app.add_subcommand("compress", "Compress a trajectory CSV");
    comp->add_option("--in", comp_opt.in_path, "Input trajectory CSV")->required();
    comp->add_option("--out", comp_opt.out_path, "Output kept-points CSV")->required();
    comp->add_option("--epsilon", comp_opt.epsilon, "Threshold in Um")
        ->check(CLI::PositiveNumber);
    comp->add_option("--algo", comp_opt.algo, "Algorithm: stc or dp")
        ->check(CLI::IsMember({"stc", "dp"}));

    FeatureOptions feat_opt;
    auto* feat = app.add_subcommand("features", "Windowed compression-rate features");
    feat->add_option("--in", feat_opt.in_path, "Input trajectory CSV")->required();
    feat->add_option("--out", feat_opt.out_path, "Output feature CSV")->required();
    feat->add_option("--epsilon", feat_opt.epsilon, "Threshold in Um")->check(CLI::PositiveNumber);
    feat->add_option("--window", feat_opt.window_s, "Window length in seconds")
        ->check(CLI::PositiveNumber);
    feat->add_option("--delta-mode", feat_opt.delta_mode, "ratio or difference")
        ->check(CLI::IsMember({"ratio", "difference"}));

    TrainOptions train_opt;
    auto* tr = app.add_subcommand("train", "Train a per-user predictor");
    tr->add_option("--features", train_opt.features_path, "Feature CSV")->required();
    tr->add_option("--reports", train_opt.reports_path, "Discomfort CSV")->required();
    tr->add_option("--model", train_opt.model_path, "Output model JSON")->required();
    tr->add_option("--metrics", train_opt.metrics_path, "Output training metrics JSON");
    tr->add_option("--head", train_opt.head, "regression or classifier")
        ->check(CLI::IsMember({"regression", "classifier"}));
    tr->add_option("--delta-mode", train_opt.delta_mode, "Mode used for the feature file")
        ->check(CLI::IsMember({"ratio", "difference"}));
    tr->add_option("--epsilon", train_opt.epsilon, "Threshold the features were computed with")
        ->check(CLI::PositiveNumber);
    tr->add_option("--lr", train_opt.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
    tr->add_option("--epochs", train_opt.epochs, "Training epochs")->check(CLI::PositiveNumber);
    tr->add_option("--seed", train_opt.seed, "Init and shuffle seed");
    tr->add_option("--split", train_opt.split_fraction, "Training fraction")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9));
    tr->add_option("--hidden", train_opt.hidden, "Hidden layer size (default per head)");

    PredictOptions pred_opt;
    double pred_epsilon = 0.0, pred_window = 0.0;
    std::string pred_mode;
    auto* pred = app.add_subcommand("predict", "Predict per-window score changes");
    pred->add_option("--model", pred_opt.model_path, "Model JSON")->required();
    pred->add_option("--in", pred_opt.in_path, "Input trajectory CSV")->required();
    pred->add_option("--out", pred_opt.out_path, "Output prediction CSV")->required();
    pred->add_option("--anchor", pred_opt.anchor, "Starting score for reconstruction");
    auto* pe = pred->add_option("--epsilon", pred_epsilon, "Override model epsilon")
                   ->check(CLI::PositiveNumber);
    auto* pw = pred->add_option("--window", pred_window, "Override model window")
                   ->check(CLI::PositiveNumber);
    auto* pm = pred->add_option("--delta-mode", pred_mode, "Override model delta mode")
                   ->check(CLI::IsMember({"ratio", "difference"}));

    EvalOptions eval_opt;
    auto* ev = app.add_subcommand("eval", "Compare reported and predicted scores");
    ev->add_option("--reported", eval_opt.reported_path, "Reported CSV (t,score or t,label)")
        ->required();
    ev->add_option("--predicted", eval_opt.predicted_path, "Predicted CSV")->required();
    ev->add_option("--out", eval_opt.out_path, "Also write the JSON report here");

    StreamOptions stream_opt;
    auto* st = app.add_subcommand("stream", "Process x,y,z,t lines from stdin");
    st->add_option("--model", stream_opt.model_path, "Optional model JSON for predictions");
    auto* se = st->add_option("--epsilon", stream_opt.epsilon, "Threshold in Um")
                   ->check(CLI::PositiveNumber);
    auto* sw = st->add_option("--window", stream_opt.window_s, "Window length in seconds")
                   ->check(CLI::PositiveNumber);
    auto* sm = st->add_option("--delta-mode", stream_opt.delta_mode, "ratio or difference")
                   ->check(CLI::IsMember({"ratio", "difference"}));
    st->add_option("--anchor", stream_opt.anchor, "Starting score for reconstruction");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // any usage error exits 1; help exits 0
    }

    try {
        if (gen->parsed()) run_gen(gen_opt);
        if (comp->parsed()) run_compress(comp_opt);
        if (feat->parsed()) run_features(feat_opt);
        if (tr->parsed()) run_train(train_opt);
        if (pred->parsed()) {
            if (pe->count() > 0) pred_opt.epsilon = pred_epsilon;
            if (pw->count() > 0) pred_opt.window_s = pred_window;
            if (pm->count() > 0) pred_opt.delta_mode = pred_mode;
            run_predict(pred_opt);
        }
        if (ev->parsed()) run_eval(eval_opt);
        if (st->parsed()) {
            stream_opt.epsilon_set = se->count() > 0;
            stream_opt.window_set = sw->count() > 0;
            stream_opt.mode_set = sm->count() > 0;
            run_stream(stream_opt);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
