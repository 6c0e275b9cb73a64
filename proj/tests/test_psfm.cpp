#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "psf/error.hpp"
#include "psf/psfm.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace psf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

PatternMatrix to_matrix(const oracle::Mat& rows) {
    PatternMatrix out(0, rows.front().size());
    for (const auto& r : rows) out.push_row(r);
    return out;
}

// Training rows placed at given distances from the origin along axis 0.
PatternMatrix along_axis(const std::vector<double>& distances) {
    PatternMatrix out(0, 1);
    for (double d : distances) out.push_row(std::vector<double>{d});
    return out;
}

void check_normalized(const WeightVector& w) {
    double total = 0.0;
    for (double v : w.weights) {
        CHECK(v >= 0.0);
        total += v;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
}

MonthlySeries periodic_series(double amp, int years, double base = 1000.0) {
    SyntheticParams p;
    p.years = years;
    p.base = base;
    p.seasonal_amp = amp;
    return generate_synthetic(p);
}

} // namespace

TEST_CASE("distance", "[psfm]") {
    std::vector<double> a{0.5, -0.5}, b{0.0, 0.0};
    CHECK(distance(a, a) == 0.0);
    std::vector<double> e1{1, 0, 0}, e2{0, 1, 0};
    CHECK_THAT(distance(e1, e2), WithinRel(std::sqrt(2.0), 1e-15));
    CHECK_THROWS_AS(distance(a, e1), ShapeError);

    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        auto p = oracle::random_pattern(rng, 12), q = oracle::random_pattern(rng, 12);
        CHECK_THAT(distance(p, q), WithinAbs(oracle::dist(p, q), 1e-12));
    }
}

TEST_CASE("k-NNw weights by hand", "[psfm][knnw]") {
    auto w = knnw_weights_from_distances(std::vector<double>{0, 1, 2}, 3, 1.0, 0.0);
    CHECK_THAT(w.weights[0], WithinAbs(2.0 / 3.0, 1e-15));
    CHECK_THAT(w.weights[1], WithinAbs(1.0 / 3.0, 1e-15));
    CHECK(w.weights[2] == 0.0);
    CHECK(w.support == std::vector<std::size_t>{0, 1});

    auto flat = knnw_weights_from_distances(std::vector<double>{0.3, 1.7, 0.9, 2.0}, 3, 0.0, 0.0);
    CHECK(flat.weights == std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0});

    auto single = knnw_weights(std::vector<double>{0.2}, along_axis({1.0}), 1, 1.0, 0.0);
    CHECK(single.weights == std::vector<double>{1.0});
}

TEST_CASE("k-NNw degenerate neighborhoods", "[psfm][knnw]") {
    // k-th distance zero: uniform over the k coincident patterns.
    auto zero = knnw_weights_from_distances(std::vector<double>{0, 0, 0.5}, 2, 1.0, 0.0);
    CHECK(zero.weights == std::vector<double>{0.5, 0.5, 0.0});
    // rho = 1 and all k neighbors equidistant: the formula gives zeros.
    auto tie = knnw_weights_from_distances(std::vector<double>{0.7, 0.7, 0.9}, 2, 1.0, 0.0);
    CHECK(tie.weights == std::vector<double>{0.5, 0.5, 0.0});
    // Ties at the k-th distance go to the lower index.
    auto order = knnw_weights_from_distances(std::vector<double>{0.5, 0.2, 0.5}, 2, 0.0, 0.0);
    CHECK(order.weights == std::vector<double>{0.5, 0.5, 0.0});
    CHECK_THROWS_AS(knnw_weights_from_distances(std::vector<double>{0.1}, 2, 1.0, 0.0), ConfigError);
}

TEST_CASE("convexity parameter gamma", "[psfm][knnw]") {
    // v = (1 - r)/(1 + gamma r) at rho = 1; distances 0, 1, 2 -> r = 0, 0.5, 1
    auto w = knnw_weights_from_distances(std::vector<double>{0, 1, 2}, 3, 1.0, 1.0);
    // v = 1, (0.5/1.5), 0
    CHECK_THAT(w.weights[0], WithinAbs(1.0 / (1.0 + 1.0 / 3.0), 1e-15));
    CHECK_THAT(w.weights[1], WithinAbs((1.0 / 3.0) / (1.0 + 1.0 / 3.0), 1e-15));
}

TEST_CASE("FNM, GRNN and N-WE weights by hand", "[psfm]") {
    auto train = along_axis({0.0, 1.0});
    std::vector<double> q{0.0};
    auto fnm = fnm_weights(q, train, 1.0, 2.0);
    CHECK_THAT(fnm.weights[0], WithinAbs(0.731059, 5e-7));
    CHECK_THAT(fnm.weights[1], WithinAbs(0.268941, 5e-7));
    CHECK_THAT(fnm.weights[0], WithinAbs(1.0 / (1.0 + std::exp(-1.0)), 1e-15));

    auto grnn = grnn_weights(q, train, 1.0);
    CHECK_THAT(grnn.weights[0], WithinAbs(0.731059, 5e-7));
    CHECK_THAT(grnn.weights[1], WithinAbs(0.268941, 5e-7));

    auto nwe = nwe_weights(q, train, std::vector<double>{1.0});
    CHECK_THAT(nwe.weights[0], WithinAbs(0.622459, 5e-7));
    CHECK_THAT(nwe.weights[1], WithinAbs(0.377541, 5e-7));

    auto one = nwe_weights(q, along_axis({0.4}), std::vector<double>{0.3});
    CHECK(one.weights == std::vector<double>{1.0});
}

TEST_CASE("symmetric and flat kernels give uniform weights", "[psfm]") {
    // Four points on the unit circle around the query.
    PatternMatrix ring(0, 2);
    ring.push_row(std::vector<double>{1, 0});
    ring.push_row(std::vector<double>{0, 1});
    ring.push_row(std::vector<double>{-1, 0});
    ring.push_row(std::vector<double>{0, -1});
    std::vector<double> q{0, 0};
    for (const auto& w : {fnm_weights(q, ring, 0.3, 2.0), grnn_weights(q, ring, 0.3),
                          nwe_weights(q, ring, std::vector<double>{0.3, 0.3})}) {
        for (double v : w.weights) CHECK_THAT(v, WithinAbs(0.25, 1e-15));
    }

    std::mt19937_64 rng(5);
    oracle::Mat rows;
    for (int i = 0; i < 40; ++i) rows.push_back(oracle::random_pattern(rng, 12));
    auto train = to_matrix(rows);
    auto query = oracle::random_pattern(rng, 12);
    std::vector<double> wide(12, 1e6);
    for (const auto& w : {fnm_weights(query, train, 1e6, 2.0), grnn_weights(query, train, 1e6),
                          nwe_weights(query, train, wide)}) {
        for (double v : w.weights) CHECK(std::abs(v - 1.0 / 40) < 1e-6);
    }
}

TEST_CASE("narrow kernels underflow with guidance", "[psfm]") {
    auto train = along_axis({1.0, 2.0});
    std::vector<double> q{0.0};
    CHECK_THROWS_AS(fnm_weights(q, train, 1e-3, 2.0), UnderflowError);
    CHECK_THROWS_AS(grnn_weights(q, train, 1e-3), UnderflowError);
    CHECK_THROWS_AS(nwe_weights(q, train, std::vector<double>{1e-3}), UnderflowError);
    try {
        fnm_weights(q, train, 1e-3, 2.0);
    } catch (const UnderflowError& e) {
        CHECK(std::string(e.what()).find("widen") != std::string::npos);
    }
    // Far from underflow the shifted computation still agrees with the direct one.
    auto w = fnm_weights(q, train, 0.1, 2.0);
    const double a = std::exp(-100.0), b = std::exp(-400.0);
    CHECK_THAT(w.weights[0], WithinRel(a / (a + b), 1e-12));
}

TEST_CASE("weights match brute-force oracles", "[psfm][property]") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> width(0.1, 2.0);
    for (int round = 0; round < 100; ++round) {
        const std::size_t n = 2 + rng() % 23;
        const std::size_t big_n = 1 + rng() % 200;
        oracle::Mat rows;
        for (std::size_t i = 0; i < big_n; ++i) rows.push_back(oracle::random_pattern(rng, n));
        auto train = to_matrix(rows);
        auto q = oracle::random_pattern(rng, n);
        const std::size_t k = 1 + rng() % big_n;
        const double rho = std::uniform_real_distribution<double>(0, 1)(rng);
        const double gamma = std::uniform_real_distribution<double>(-0.9, 3)(rng);
        const double sigma = width(rng);
        std::vector<double> h(n);
        for (double& x : h) x = width(rng);

        auto nn = nearest_neighbors(distances_to(q, train), k);
        auto ref = oracle::knn(q, rows, k);
        for (std::size_t j = 0; j < k; ++j) CHECK(nn[j] == ref[j].second);

        auto check = [](const WeightVector& got, const oracle::Vec& want) {
            check_normalized(got);
            for (std::size_t i = 0; i < want.size(); ++i) {
                CHECK(std::abs(got.weights[i] - want[i]) < 1e-12);
            }
        };
        check(knnw_weights(q, train, k, rho, gamma), oracle::knnw(q, rows, k, rho, gamma));
        check(fnm_weights(q, train, sigma, 2.0), oracle::fnm(q, rows, sigma, 2.0));
        check(fnm_weights(q, train, sigma, 1.3), oracle::fnm(q, rows, sigma, 1.3));
        check(grnn_weights(q, train, sigma), oracle::grnn(q, rows, sigma));
        check(nwe_weights(q, train, h), oracle::nwe(q, rows, h));

        // Isotropic N-WE with bandwidth h equals FNM(alpha=2) with sigma = h*sqrt(2).
        std::vector<double> iso(n, sigma);
        auto a = nwe_weights(q, train, iso);
        auto b = fnm_weights(q, train, sigma * std::sqrt(2.0), 2.0);
        for (std::size_t i = 0; i < big_n; ++i) CHECK(std::abs(a.weights[i] - b.weights[i]) < 1e-12);
    }
}

TEST_CASE("kernel weights decrease strictly with distance", "[psfm][property]") {
    std::mt19937_64 rng(77);
    for (int round = 0; round < 50; ++round) {
        oracle::Mat rows;
        for (int i = 0; i < 30; ++i) rows.push_back(oracle::random_pattern(rng, 6));
        auto train = to_matrix(rows);
        auto q = oracle::random_pattern(rng, 6);
        auto d = distances_to(q, train);
        std::vector<double> h(6, 0.4);
        for (const auto& w : {fnm_weights(q, train, 0.5, 2.0), grnn_weights(q, train, 0.5),
                              nwe_weights(q, train, h)}) {
            for (std::size_t a = 0; a < d.size(); ++a) {
                for (std::size_t b = 0; b < d.size(); ++b) {
                    if (d[a] < d[b]) CHECK(w.weights[a] > w.weights[b]);
                }
            }
        }
    }
}

TEST_CASE("regress", "[psfm]") {
    PatternMatrix y(0, 2);
    y.push_row(std::vector<double>{1, 3});
    y.push_row(std::vector<double>{3, 5});
    WeightVector half{{0.5, 0.5}, {0, 1}};
    CHECK(regress(half, y) == std::vector<double>{2, 4});
    WeightVector hot{{0.0, 1.0}, {1}};
    CHECK(regress(hot, y) == std::vector<double>{3, 5});
    WeightVector bad{{1.0}, {0}};
    CHECK_THROWS_AS(regress(bad, y), ShapeError);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    oracle::Mat rows(50, oracle::Vec(12));
    for (auto& r : rows) for (double& v : r) v = u(rng) - 0.5;
    oracle::Vec w(50);
    for (double& v : w) v = u(rng);
    w = oracle::normalize(w);
    WeightVector wv{w, {}};
    for (std::size_t i = 0; i < 50; ++i) wv.support.push_back(i);
    auto got = regress(wv, to_matrix(rows));
    auto want = oracle::regress(w, rows);
    for (std::size_t t = 0; t < 12; ++t) CHECK(std::abs(got[t] - want[t]) < 1e-12);
}

TEST_CASE("config validation", "[psfm]") {
    PsfmConfig c;
    c.kind = ModelKind::KNNW;
    c.gamma = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.gamma = 0.0;
    c.rho = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = PsfmConfig{};
    c.kind = ModelKind::NWE;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.with_isotropic_h(0.2);
    CHECK_NOTHROW(c.validate());
    c.kind = ModelKind::GRNN;
    c.sigma = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK(PsfmConfig{}.label() == "FNM");
}

TEST_CASE("forecast_single recalls the exact-match pattern with 1-NN", "[psfm][forecast]") {
    auto s = periodic_series(0.3, 6);
    PsfmConfig c;
    c.kind = ModelKind::KNNW;
    c.k = 1;
    auto split = SplitSpec::holdout(s, 12);
    auto f = forecast_single(s, c, split);
    // Same-phase training patterns coincide with the query.
    const std::size_t hit = f.weights.support.front();
    CHECK(f.weights.weights[hit] == 1.0);
    for (std::size_t t = 0; t < 12; ++t) {
        CHECK_THAT(f.forecast[t], WithinRel(s[split.test_origin + 1 + t], 1e-12));
    }
}

// Narrow kernels put all weight on the same-phase patterns, which coincide
// with the query.
TEST_CASE("every PSFM recovers a noiseless periodic series", "[psfm][forecast]") {
    auto s = periodic_series(0.25, 8, 5000.0);
    auto split = SplitSpec::holdout(s, 12);
    std::vector<PsfmConfig> configs(4);
    configs[0].kind = ModelKind::KNNW;
    configs[0].k = 4;
    configs[1].kind = ModelKind::FNM;
    configs[1].sigma = 0.02;
    configs[2].kind = ModelKind::NWE;
    configs[3].kind = ModelKind::GRNN;
    configs[3].sigma = 0.02;
    for (const auto& c : configs) {
        for (std::size_t n : {12u, 24u}) {
            auto cc = c;
            cc.n = n;
            if (cc.kind == ModelKind::NWE) cc.with_isotropic_h(0.02);
            auto f = forecast_single(s, cc, split);
            for (std::size_t t = 0; t < 12; ++t) {
                CHECK_THAT(f.forecast[t], WithinRel(s[split.test_origin + 1 + t], 1e-6));
            }
        }
    }
}

TEST_CASE("V1 decoding with perfect coding equals V2 on the same weights", "[psfm][forecast]") {
    SyntheticParams p;
    p.years = 8;
    p.trend = 3.0;
    p.seasonal_amp = 0.2;
    p.noise_sd = 0.03;
    auto s = generate_synthetic(p);
    auto split = SplitSpec::holdout(s, 12);
    PsfmConfig c;
    c.kind = ModelKind::GRNN;
    c.sigma = 0.4;
    auto v2 = forecast_single(s, c, split);
    // Decoding depends only on the coding values: V2 patterns decoded with V2 coding.
    CHECK(decode_y(v2.y_pattern, v2.coding) == v2.forecast);

    auto c1 = c;
    c1.variant = Variant::V1;
    auto v1 = forecast_single(s, c1, split, v2.coding);
    CHECK(v1.coding == v2.coding);
    CHECK(v1.weights.weights == v2.weights.weights);
    CHECK(decode_y(v1.y_pattern, v1.coding) == v1.forecast);

    // Predicted coding is positive and in the demand range.
    auto predicted = forecast_single(s, c1, split);
    CHECK(predicted.coding.mean > 0.0);
    CHECK(predicted.coding.dispersion > 0.0);
}

TEST_CASE("scaling the series scales V2 forecasts and keeps weights", "[psfm][property]") {
    SyntheticParams p;
    p.years = 7;
    p.trend = 1.5;
    p.seasonal_amp = 0.15;
    p.noise_sd = 0.04;
    auto s = generate_synthetic(p);
    std::vector<double> scaled(s.values().begin(), s.values().end());
    for (double& v : scaled) v *= 3.25;
    MonthlySeries s2{"X", s.start(), scaled};
    auto split = SplitSpec::holdout(s, 12);
    for (ModelKind kind : {ModelKind::KNNW, ModelKind::FNM, ModelKind::NWE, ModelKind::GRNN}) {
        PsfmConfig c;
        c.kind = kind;
        c.sigma = 0.5;
        c.with_isotropic_h(0.3);
        auto a = forecast_single(s, c, split);
        auto b = forecast_single(s2, c, split);
        for (std::size_t i = 0; i < a.weights.weights.size(); ++i) {
            CHECK_THAT(b.weights.weights[i], WithinAbs(a.weights.weights[i], 1e-12));
        }
        for (std::size_t t = 0; t < 12; ++t) {
            CHECK_THAT(b.y_pattern[t], WithinAbs(a.y_pattern[t], 1e-12));
            CHECK_THAT(b.forecast[t], WithinRel(3.25 * a.forecast[t], 1e-12));
        }
    }
}

TEST_CASE("forecast_single errors", "[psfm][forecast]") {
    auto s = periodic_series(0.2, 3);
    PsfmConfig c;
    CHECK_THROWS_AS(forecast_single(s, c, SplitSpec::holdout(s, 12)), InsufficientDataError);
    c.m = 6;
    CHECK_THROWS_AS(forecast_single(s, c, SplitSpec::holdout(s, 12)), ConfigError);
}
