#include <catch_amalgamated.hpp>

#include <cmath>

#include "comprate/metrics.hpp"
#include "comprate/rng.hpp"

using namespace comprate;

namespace {

// O(n^2) counting ranks: 1 + (#smaller) + (#equal - 1)/2. A deliberately
// different route from the library's sort-based ranking.
std::vector<double> counting_ranks(const std::vector<double>& v) {
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t smaller = 0, equal = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] < v[i]) ++smaller;
            if (v[j] == v[i]) ++equal;
        }
        ranks[i] = 1.0 + static_cast<double>(smaller) +
                   0.5 * static_cast<double>(equal - 1);
    }
    return ranks;
}

double product_moment(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

double spearman_oracle(const std::vector<double>& x, const std::vector<double>& y) {
    return product_moment(counting_ranks(x), counting_ranks(y));
}

}  // namespace

TEST_CASE("spearman endpoints and the worked example") {
    CHECK(*spearman({1, 2, 3, 4, 5}, {10, 20, 30, 40, 50}) == 1.0);
    CHECK(*spearman({1, 2, 3, 4, 5}, {50, 40, 30, 20, 10}) == -1.0);
    // rank oracle: d^2 = 1+1+1+1+0 = 4, rho = 1 - 6*4/(5*24) = 0.8
    CHECK_THAT(*spearman({1, 2, 3, 4, 5}, {2, 1, 4, 3, 5}),
               Catch::Matchers::WithinAbs(0.8, 1e-12));
}

TEST_CASE("spearman signals undefined on constant input") {
    CHECK_FALSE(spearman({1, 1, 1, 1}, {1, 2, 3, 4}).has_value());
    CHECK_FALSE(spearman({1, 2, 3, 4}, {2, 2, 2, 2}).has_value());
    CHECK_THROWS_AS(spearman({1, 2}, {1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(spearman({1, 2, 3}, {1, 2}), std::invalid_argument);
}

TEST_CASE("pearson basics and the frozen 5-point oracle value") {
    std::vector<double> xs = {0.0, 1.0, 2.0, 3.0, 4.0};
    std::vector<double> affine;
    for (double x : xs) affine.push_back(2.0 * x + 1.0);
    CHECK_THAT(*pearson(xs, affine), Catch::Matchers::WithinAbs(1.0, 1e-12));

    std::vector<double> negated;
    for (double x : xs) negated.push_back(-x);
    CHECK_THAT(*pearson(xs, negated), Catch::Matchers::WithinAbs(-1.0, 1e-12));

    // spreadsheet-style oracle value computed before the build
    CHECK_THAT(*pearson({0.2, 0.5, 0.9, 1.3, 2.0}, {1.1, 0.9, 1.8, 2.4, 3.1}),
               Catch::Matchers::WithinAbs(0.9698038293099701, 1e-12));

    CHECK_FALSE(pearson({3, 3, 3}, {1, 2, 3}).has_value());
}

TEST_CASE("spearman and pearson match brute-force oracles on random vectors") {
    Rng rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + rng.below(12);
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < n; ++i) {
            // coarse grid so ties actually occur
            xs.push_back(std::floor(rng.uniform(0, 6)));
            ys.push_back(std::floor(rng.uniform(0, 6)));
        }
        const auto rho = spearman(xs, ys);
        const auto r = pearson(xs, ys);
        if (!rho || !r) continue;  // constant draw
        CHECK_THAT(*rho, Catch::Matchers::WithinAbs(spearman_oracle(xs, ys), 1e-12));
        CHECK_THAT(*r, Catch::Matchers::WithinAbs(product_moment(xs, ys), 1e-12));
    }
}

TEST_CASE("correlations are invariant under positive affine transforms") {
    Rng rng(23);
    std::vector<double> xs, ys;
    for (int i = 0; i < 25; ++i) {
        xs.push_back(rng.uniform(-3, 3));
        ys.push_back(rng.uniform(-3, 3));
    }
    std::vector<double> xs2, ys3;
    for (double x : xs) xs2.push_back(4.0 * x + 11.0);
    for (double y : ys) ys3.push_back(0.5 * y - 2.0);
    CHECK_THAT(*pearson(xs2, ys3), Catch::Matchers::WithinAbs(*pearson(xs, ys), 1e-9));
    CHECK_THAT(*spearman(xs2, ys3), Catch::Matchers::WithinAbs(*spearman(xs, ys), 1e-9));

    // spearman additionally survives any strictly monotone transform
    std::vector<double> cubed;
    for (double x : xs) cubed.push_back(x * x * x);
    CHECK_THAT(*spearman(cubed, ys), Catch::Matchers::WithinAbs(*spearman(xs, ys), 1e-9));
}

TEST_CASE("spearman equals pearson on tie-free data already in rank order") {
    const std::vector<double> xs = {1, 2, 3, 4, 5, 6};
    const std::vector<double> ys = {2, 4, 5, 7, 11, 13};  // strictly increasing
    CHECK_THAT(*spearman(xs, ys), Catch::Matchers::WithinAbs(1.0, 1e-15));
    CHECK_THAT(*pearson(detail::fractional_ranks(xs), detail::fractional_ranks(ys)),
               Catch::Matchers::WithinAbs(*spearman(xs, ys), 1e-15));
}

TEST_CASE("curve_area_error on identical and offset curves") {
    CurvePair same{{0, 60, 120, 180}, {1, 2, 3, 4}, {1, 2, 3, 4}};
    CHECK(curve_area_error(same) == 0.0);

    CurvePair offset{{0, 100, 250}, {5, 5, 5}, {5.5, 5.5, 5.5}};
    CHECK_THAT(curve_area_error(offset), Catch::Matchers::WithinAbs(0.1, 1e-12));

    CurvePair zero{{0, 1}, {0, 0}, {1, 1}};
    CHECK_THROWS_AS(curve_area_error(zero), std::invalid_argument);

    CurvePair bad{{0, 0}, {1, 1}, {1, 1}};
    CHECK_THROWS_AS(curve_area_error(bad), std::invalid_argument);
}

TEST_CASE("adding a constant to a non-crossing prediction shifts the error linearly") {
    Rng rng(31);
    std::vector<double> times, reported, predicted;
    double t = 0.0;
    for (int i = 0; i < 12; ++i) {
        times.push_back(t);
        t += rng.uniform(0.5, 3.0);
        reported.push_back(rng.uniform(4.0, 6.0));
        predicted.push_back(rng.uniform(6.5, 7.5));  // strictly above reported
    }
    const CurvePair base{times, reported, predicted};
    const double span = times.back() - times.front();
    double reported_area = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        reported_area += 0.5 * (times[i + 1] - times[i]) * (reported[i] + reported[i + 1]);
    }
    const double c = 1.25;  // keeps predicted above reported
    std::vector<double> shifted;
    for (double p : predicted) shifted.push_back(p + c);
    const CurvePair moved{times, reported, shifted};
    CHECK_THAT(curve_area_error(moved) - curve_area_error(base),
               Catch::Matchers::WithinAbs(c * span / reported_area, 1e-9));
}

TEST_CASE("point_diff reports both signed and absolute means") {
    CurvePair pair{{0, 1, 2}, {1, 2, 3}, {2, 1, 3}};
    const auto d = point_diff(pair);
    CHECK_THAT(d.mean_signed, Catch::Matchers::WithinAbs(0.0, 1e-15));
    CHECK_THAT(d.mean_abs, Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-15));
}

TEST_CASE("confusion matrix accuracies") {
    std::vector<Direction> all = {Direction::lower, Direction::same, Direction::higher};
    const auto perfect = confusion(all, all);
    CHECK(perfect.global_accuracy() == 1.0);
    CHECK(*perfect.class_accuracy(Direction::lower) == 1.0);
    CHECK(perfect.total() == 3);

    const auto wrong = confusion({Direction::higher}, {Direction::lower});
    CHECK(wrong.global_accuracy() == 0.0);

    CHECK_THROWS_AS(confusion({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(confusion({Direction::same}, {}), std::invalid_argument);
}

TEST_CASE("confusion reconstruction of the reference test block") {
    // counts [[5,0,1],[0,1,1],[0,1,13]] -> per-class 83.3 / 50.0 / 92.9,
    // global 86.4 (rounded)
    std::vector<Direction> actual, predicted;
    auto add = [&](Direction a, Direction p, int n) {
        for (int i = 0; i < n; ++i) {
            actual.push_back(a);
            predicted.push_back(p);
        }
    };
    add(Direction::lower, Direction::lower, 5);
    add(Direction::lower, Direction::higher, 1);
    add(Direction::same, Direction::same, 1);
    add(Direction::same, Direction::higher, 1);
    add(Direction::higher, Direction::same, 1);
    add(Direction::higher, Direction::higher, 13);

    const auto m = confusion(actual, predicted);
    CHECK(m.total() == 22);
    CHECK_THAT(*m.class_accuracy(Direction::lower),
               Catch::Matchers::WithinAbs(5.0 / 6.0, 1e-12));
    CHECK_THAT(*m.class_accuracy(Direction::same), Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(*m.class_accuracy(Direction::higher),
               Catch::Matchers::WithinAbs(13.0 / 14.0, 1e-12));
    CHECK_THAT(m.global_accuracy(), Catch::Matchers::WithinAbs(19.0 / 22.0, 1e-12));
    CHECK_THAT(m.global_accuracy(), Catch::Matchers::WithinAbs(0.864, 5e-4));
}

TEST_CASE("confusion reconstruction of the reference training block") {
    // counts [[7,1,6],[0,4,6],[1,1,33]] -> global 74.6 (rounded)
    ConfusionMatrix m;
    m.counts = {{{7, 1, 6}, {0, 4, 6}, {1, 1, 33}}};
    CHECK(m.total() == 59);
    CHECK_THAT(*m.class_accuracy(Direction::lower), Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(*m.class_accuracy(Direction::same), Catch::Matchers::WithinAbs(0.4, 1e-12));
    CHECK_THAT(*m.class_accuracy(Direction::higher),
               Catch::Matchers::WithinAbs(33.0 / 35.0, 1e-12));
    CHECK_THAT(m.global_accuracy(), Catch::Matchers::WithinAbs(0.746, 5e-4));
}

TEST_CASE("counts always sum to the number of samples") {
    Rng rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        std::vector<Direction> a, p;
        for (std::size_t i = 0; i < n; ++i) {
            a.push_back(static_cast<Direction>(rng.below(3)));
            p.push_back(static_cast<Direction>(rng.below(3)));
        }
        CHECK(confusion(a, p).total() == n);
    }
}

TEST_CASE("metrics JSON carries nulls for undefined correlations") {
    CurvePair constant{{0, 1, 2}, {5, 5, 5}, {4, 5, 6}};
    const auto j = curve_metrics_json(constant, std::nullopt);
    CHECK(j.at("spearman").is_null());
    CHECK(j.at("pearson").is_null());
    CHECK(j.at("area_error").get<double>() > 0.0);
    CHECK(j.contains("mean_abs_point_diff"));
    CHECK(j.contains("mean_signed_point_diff"));
}
