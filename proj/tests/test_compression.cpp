#include <catch_amalgamated.hpp>

#include "comprate/compression.hpp"
#include "helpers.hpp"

using namespace comprate;
using testutil::pt;

namespace {

Trajectory fig1_trajectory_a() {
    // Constant heading, speed doubles between t=2 and t=4: the points at t=1
    // and t=3 are inferable from their neighbours.
    Trajectory traj;
    traj.points = {pt(0, 0, 0, 0), pt(1, 0, 0, 1), pt(2, 0, 0, 2),
                   pt(4, 0, 0, 3), pt(6, 0, 0, 4), pt(7, 0, 0, 5)};
    return traj;
}

Trajectory fig1_trajectory_b() {
    // Same speed profile but the t=3 point is a direction change; dropping it
    // would extrapolate an erroneous position.
    Trajectory traj;
    traj.points = {pt(0, 0, 0, 0), pt(1, 0, 0, 1), pt(2, 0, 0, 2),
                   pt(4, 0, 0, 3), pt(4, 2, 0, 4), pt(4, 3, 0, 5)};
    return traj;
}

}  // namespace

TEST_CASE("predict_position extrapolates at constant velocity") {
    const auto p = predict_position(pt(0, 0, 0, 0), pt(1, 0, 0, 1), 2.0);
    CHECK(p.x == 2.0);
    CHECK(p.y == 0.0);

    // at t = last.t the prediction is the last position itself
    const auto q = predict_position(pt(0, 0, 0, 0), pt(1, 2, 0, 2), 2.0);
    CHECK(q.x == 1.0);
    CHECK(q.y == 2.0);

    const auto r = predict_position(pt(0, 0, 0, 0), pt(1, 2, 0, 2), 3.0);
    CHECK(r.x == 1.5);
    CHECK(r.y == 3.0);

    CHECK_THROWS_AS(predict_position(pt(0, 0, 0, 1), pt(1, 0, 0, 1), 2.0), std::invalid_argument);
    CHECK_THROWS_AS(predict_position(pt(0, 0, 0, 0), pt(1, 0, 0, 2), 1.0), std::invalid_argument);
}

TEST_CASE("stc_compress collapses collinear constant-speed runs to endpoints") {
    const auto traj = testutil::straight_line(5);
    const auto result = stc_compress(traj, {});
    CHECK(result.kept == std::vector<std::size_t>{0, 4});
    CHECK(result.removed_count == 3);
    CHECK(result.total_count == 5);
    CHECK(compression_rate(result) == 0.6);
}

TEST_CASE("stc_compress rejects trajectories below 2 points") {
    Trajectory one;
    one.points = {pt(0, 0, 0, 0)};
    CHECK_THROWS_AS(stc_compress(one, {}), std::invalid_argument);
    CHECK_THROWS_AS(stc_compress(Trajectory{}, {}), std::invalid_argument);

    Trajectory two;
    two.points = {pt(0, 0, 0, 0), pt(5, 5, 0, 1)};
    const auto result = stc_compress(two, {});
    CHECK(result.kept == std::vector<std::size_t>{0, 1});
    CHECK(result.removed_count == 0);
}

TEST_CASE("stc_compress keeps direction changes and drops inferable points") {
    CompressionConfig cfg;  // epsilon 0.4

    // speed-change-only trajectory loses two points
    const auto a = stc_compress(fig1_trajectory_a(), cfg);
    CHECK(a.kept == std::vector<std::size_t>{0, 2, 4, 5});
    CHECK(a.removed_count == 2);

    // the direction-change point at t=3 survives; only t=1 is removed
    const auto b = stc_compress(fig1_trajectory_b(), cfg);
    CHECK(b.kept == std::vector<std::size_t>{0, 2, 3, 4, 5});
    CHECK(b.removed_count == 1);
}

TEST_CASE("stc_compress matches the independent reference scan on random input") {
    CompressionConfig cfg;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const auto traj = testutil::random_walk(20, seed, 0.6);
        const auto result = stc_compress(traj, cfg);
        CHECK(result.kept == testutil::stc_reference_kept(traj, cfg.epsilon));
    }
}

TEST_CASE("stc_compress zero-residual elimination") {
    // Interior points exactly on the pair's extrapolation are always removed.
    Trajectory traj;
    for (int i = 0; i < 9; ++i) {
        traj.points.push_back(pt(1.5 * i, -0.5 * i, 0.25 * i, i));
    }
    const auto result = stc_compress(traj, {});
    CHECK(result.kept == std::vector<std::size_t>{0, 8});
}

TEST_CASE("dp_compress basics") {
    CompressionConfig cfg;

    const auto line = dp_compress(testutil::straight_line(5), cfg);
    CHECK(line.kept == std::vector<std::size_t>{0, 4});

    // right-angle corner: perpendicular distance sqrt(2)/2 > 0.4 keeps all 3
    Trajectory corner;
    corner.points = {pt(0, 0, 0, 0), pt(1, 0, 0, 1), pt(1, 1, 0, 2)};
    const auto kept = dp_compress(corner, cfg);
    CHECK(kept.kept == std::vector<std::size_t>{0, 1, 2});

    // epsilon -> infinity keeps only the endpoints
    CompressionConfig huge;
    huge.epsilon = 1e12;
    const auto two = dp_compress(testutil::random_walk(40, 3), huge);
    CHECK(two.kept == std::vector<std::size_t>{0, 39});

    CHECK_THROWS_AS(dp_compress(Trajectory{}, cfg), std::invalid_argument);
}

TEST_CASE("dp_compress matches the independent recursive reference") {
    CompressionConfig cfg;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto traj = testutil::random_walk(25, seed, 0.7);
        CHECK(dp_compress(traj, cfg).kept == testutil::dp_reference_kept(traj, cfg.epsilon));
    }
}

TEST_CASE("dp_compress threshold monotonicity") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto traj = testutil::random_walk(60, seed);
        std::size_t prev_kept = traj.size() + 1;
        for (const double eps : {0.05, 0.2, 0.5, 1.0, 2.0, 5.0}) {
            CompressionConfig cfg;
            cfg.epsilon = eps;
            const std::size_t kept = dp_compress(traj, cfg).kept.size();
            CHECK(kept <= prev_kept);
            prev_kept = kept;
        }
    }
}

TEST_CASE("dp_compress reconstruction bound") {
    // Every removed point lies within epsilon of the simplified polyline.
    CompressionConfig cfg;
    cfg.epsilon = 0.8;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto traj = testutil::random_walk(50, seed);
        const auto result = dp_compress(traj, cfg);
        for (std::size_t i = 0; i < traj.size(); ++i) {
            bool kept = std::find(result.kept.begin(), result.kept.end(), i) != result.kept.end();
            if (kept) continue;
            // distance to the polyline segment spanning this index
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k + 1 < result.kept.size(); ++k) {
                if (result.kept[k] < i && i < result.kept[k + 1]) {
                    best = detail::point_segment_dist2(traj.points[i].pos(),
                                                       traj.points[result.kept[k]].pos(),
                                                       traj.points[result.kept[k + 1]].pos());
                }
            }
            CHECK(best < cfg.epsilon * cfg.epsilon);
        }
    }
}

TEST_CASE("both compressors keep first and last points") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto traj = testutil::random_walk(2 + seed % 30, seed);
        for (const double eps : {0.01, 0.4, 3.0}) {
            CompressionConfig cfg;
            cfg.epsilon = eps;
            for (const auto& result : {stc_compress(traj, cfg), dp_compress(traj, cfg)}) {
                REQUIRE_FALSE(result.kept.empty());
                CHECK(result.kept.front() == 0);
                CHECK(result.kept.back() == traj.size() - 1);
                CHECK(result.removed_count + result.kept.size() == result.total_count);
            }
        }
    }
}

TEST_CASE("compression is deterministic bit-for-bit") {
    const auto traj = testutil::random_walk(120, 9);
    const auto a = stc_compress(traj, {});
    const auto b = stc_compress(traj, {});
    CHECK(a.kept == b.kept);
    CHECK(compression_rate(a) == compression_rate(b));
}

TEST_CASE("compression_rate arithmetic and bounds") {
    CompressionResult r;
    r.total_count = 5;
    r.removed_count = 3;
    r.kept = {0, 2};
    CHECK(compression_rate(r) == 0.6);

    r.removed_count = 0;
    CHECK(compression_rate(r) == 0.0);

    CompressionResult empty;
    CHECK_THROWS_AS(compression_rate(empty), std::invalid_argument);

    // rate <= (T-2)/T for any window with >= 2 points
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto traj = testutil::random_walk(2 + seed * 3, seed);
        const auto result = stc_compress(traj, {});
        const double rate = compression_rate(result);
        const auto t = static_cast<double>(result.total_count);
        CHECK(rate >= 0.0);
        CHECK(rate <= (t - 2.0) / t);
    }
}

TEST_CASE("delta_rate in both modes") {
    CHECK(delta_rate(0.5, 0.5, DeltaMode::ratio) == 1.0);
    CHECK_THAT(*delta_rate(0.6, 0.8, DeltaMode::ratio),
               Catch::Matchers::WithinAbs(0.75, 1e-15));
    CHECK_THAT(*delta_rate(0.6, 0.8, DeltaMode::difference),
               Catch::Matchers::WithinAbs(-0.2, 1e-15));
    CHECK_FALSE(delta_rate(0.6, 0.0, DeltaMode::ratio).has_value());
    CHECK(delta_rate(0.6, 0.0, DeltaMode::difference) == 0.6);
}

TEST_CASE("windowed_features on single and repeated collinear windows") {
    CompressionConfig cfg;

    // one window exactly covering a 5-point collinear segment
    const auto single = windowed_features(testutil::straight_line(5), 10.0, cfg);
    REQUIRE(single.size() == 1);
    CHECK(single[0].rate == 0.6);
    CHECK(single[0].point_count == 5);
    CHECK_FALSE(single[0].delta.has_value());

    // two identical collinear windows: ratio delta is exactly 1
    const auto twin = windowed_features(testutil::straight_line(20, 2.0, 0.5), 5.0, cfg);
    REQUIRE(twin.size() == 2);
    CHECK(twin[0].rate == twin[1].rate);
    REQUIRE(twin[1].delta.has_value());
    CHECK(*twin[1].delta == 1.0);

    CHECK_THROWS_AS(windowed_features(testutil::straight_line(5), 0.0, cfg),
                    std::invalid_argument);
}

TEST_CASE("windowed_features matches slice-then-compress composition") {
    // 600 s session sampled at 2 Hz, 120 s windows -> 5 features
    const auto traj = testutil::random_walk(1200, 21, 0.3);  // t = 0..1199
    CompressionConfig cfg;
    const double window_s = 240.0;
    const auto features = windowed_features(traj, window_s, cfg);
    REQUIRE(features.size() == 5);

    double prev_rate = 0.0;
    for (std::size_t w = 0; w < features.size(); ++w) {
        const double t0 = traj.start_time() + static_cast<double>(w) * window_s;
        const auto sub = slice_window(traj, t0, t0 + window_s);
        const double expected =
            sub.size() >= 2 ? compression_rate(stc_compress(sub, cfg)) : 0.0;
        CHECK(features[w].rate == expected);
        CHECK(features[w].point_count == sub.size());
        if (w > 0) {
            const auto expected_delta = delta_rate(expected, prev_rate, cfg.delta_mode);
            CHECK(features[w].delta == expected_delta);
        }
        prev_rate = expected;
    }
}

TEST_CASE("windowed_features marks delta undefined after a zero-rate window") {
    // Gap in the middle: an empty window produces rate 0 and the next ratio
    // delta is undefined.
    Trajectory traj;
    for (int i = 0; i < 6; ++i) traj.points.push_back(pt(2.0 * i, 0, 0, i));
    for (int i = 0; i < 6; ++i) {
        traj.points.push_back(pt(30 + 0.5 * i * i, 0, 0, 20 + i));
    }
    CompressionConfig cfg;
    const auto features = windowed_features(traj, 6.0, cfg);
    REQUIRE(features.size() == 5);
    CHECK(features[1].point_count == 0);
    CHECK(features[1].rate == 0.0);
    REQUIRE(features[2].window_index == 2);
    CHECK_FALSE(features[2].delta.has_value());  // ratio against 0 undefined
}
