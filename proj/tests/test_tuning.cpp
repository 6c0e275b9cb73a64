#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "psf/error.hpp"
#include "psf/eval.hpp"
#include "psf/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace psf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

MonthlySeries series_of(std::vector<double> v) { return {"T", {2000, 1}, std::move(v)}; }

MonthlySeries noisy(std::uint64_t seed, int years = 6) {
    SyntheticParams p;
    p.seed = seed;
    p.years = years;
    p.base = 3000;
    p.trend = 4;
    p.seasonal_amp = 0.2;
    p.noise_sd = 0.04;
    return generate_synthetic(p);
}

// Leave-one-out score written out directly from pattern pairs and oracle weights.
double oracle_loo(const MonthlySeries& s, const PsfmConfig& c, std::size_t last) {
    auto set = build_pattern_set(s, c.n, c.m, c.variant, last);
    double total = 0.0;
    int folds = 0;
    for (std::size_t j = 0; j < set.size(); ++j) {
        oracle::Mat xs, ys;
        for (std::size_t i = 0; i < set.size(); ++i) {
            const auto oi = static_cast<long>(set.pairs[i].origin);
            const auto oj = static_cast<long>(set.pairs[j].origin);
            if (std::abs(oi - oj) < static_cast<long>(c.m)) continue;
            xs.push_back(set.pairs[i].x.components);
            ys.push_back(set.pairs[i].y.components);
        }
        if (xs.size() < (c.kind == ModelKind::KNNW ? c.k : 1)) continue;
        const auto& q = set.pairs[j].x.components;
        oracle::Vec w;
        switch (c.kind) {
        case ModelKind::KNNW: w = oracle::knnw(q, xs, c.k, c.rho, c.gamma); break;
        case ModelKind::FNM: w = oracle::fnm(q, xs, c.sigma, c.alpha); break;
        case ModelKind::GRNN: w = oracle::grnn(q, xs, c.sigma); break;
        case ModelKind::NWE: w = oracle::nwe(q, xs, c.h); break;
        }
        auto y_hat = oracle::regress(w, ys);
        const auto& cv = set.pairs[j].y.coding;
        double ape = 0.0;
        for (std::size_t t = 0; t < c.m; ++t) {
            const double actual = s[set.pairs[j].origin + 1 + t];
            ape += 100.0 * std::abs(y_hat[t] * cv.dispersion + cv.mean - actual) / actual;
        }
        total += ape / static_cast<double>(c.m);
        ++folds;
    }
    return total / folds;
}

} // namespace

TEST_CASE("LOO score on a hand-worked series", "[tuning]") {
    // n = 2, m = 1: origins 1, 2, 3 with x-patterns up, up, down.
    // Folds forecast 1.5, 8 and 6 against 4, 3 and 5.
    PsfmConfig c;
    c.kind = ModelKind::KNNW;
    c.n = 2;
    c.m = 1;
    c.k = 1;
    auto score = loo_cv_score(series_of({1, 2, 4, 3, 5}), c, 4);
    CHECK(score.n_folds == 3);
    CHECK_THAT(score.score, WithinRel((62.5 + 500.0 / 3.0 + 20.0) / 3.0, 1e-12));
}

TEST_CASE("LOO score matches a direct oracle", "[tuning][property]") {
    std::mt19937_64 rng(31);
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto s = noisy(seed);
        const std::size_t last = s.size() - 13;
        for (std::size_t n : {3u, 6u, 12u}) {
            PsfmConfig c;
            c.n = n;
            for (ModelKind kind : {ModelKind::KNNW, ModelKind::FNM, ModelKind::GRNN, ModelKind::NWE}) {
                c.kind = kind;
                c.k = 1 + rng() % 6;
                c.sigma = 0.1 + 0.1 * static_cast<double>(rng() % 10);
                c.h.assign(n, 0.0);
                for (double& h : c.h) h = 0.1 + 0.05 * static_cast<double>(rng() % 10);
                CHECK_THAT(loo_cv_score(s, c, last).score, WithinRel(oracle_loo(s, c, last), 1e-10));
                c.with_isotropic_h(0.25);
                if (kind == ModelKind::NWE) {
                    CHECK_THAT(loo_cv_score(s, c, last).score, WithinRel(oracle_loo(s, c, last), 1e-10));
                }
            }
        }
    }
}

TEST_CASE("a periodic series scores zero with an exact neighbor", "[tuning]") {
    SyntheticParams p;
    p.years = 6;
    p.seasonal_amp = 0.3;
    auto s = generate_synthetic(p);
    PsfmConfig c;
    c.kind = ModelKind::KNNW;
    c.k = 1;
    CHECK_THAT(loo_cv_score(s, c, s.size() - 1).score, WithinAbs(0.0, 1e-9));
    c.kind = ModelKind::FNM;
    c.sigma = 0.02;
    CHECK_THAT(loo_cv_score(s, c, s.size() - 1).score, WithinAbs(0.0, 1e-9));
}

TEST_CASE("LOO needs three usable folds", "[tuning]") {
    PsfmConfig c;
    c.kind = ModelKind::KNNW;
    c.n = 2;
    c.m = 1;
    c.k = 3;
    CHECK_THROWS_AS(loo_cv_score(series_of({1, 2, 4, 3, 5}), c, 4), InsufficientDataError);
}

TEST_CASE("grid search", "[tuning]") {
    auto s = noisy(9, 7);
    const std::size_t last = s.size() - 13;
    GridSpec grid;
    grid.n_values = {6, 12};
    grid.k_values = {2, 5};
    grid.sigma_values = {0.2, 0.8};
    grid.h_values = {0.1, 0.4};

    SECTION("each cell equals an independent LOO call") {
        for (ModelKind kind : {ModelKind::KNNW, ModelKind::FNM, ModelKind::NWE, ModelKind::GRNN}) {
            auto r = grid_search(s, kind, grid, last);
            REQUIRE(r.table.size() == 4);
            for (const auto& cell : r.table) {
                CHECK(cell.score == loo_cv_score(s, cell.config, last).score);
            }
            auto best = std::min_element(r.table.begin(), r.table.end(),
                                         [](auto& a, auto& b) { return a.score < b.score; });
            CHECK(r.best_score <= best->score + kScoreTieTolerance);
        }
    }
    SECTION("a singleton grid returns its only cell") {
        GridSpec one;
        one.n_values = {12};
        one.sigma_values = {0.4};
        auto r = grid_search(s, ModelKind::FNM, one, last);
        PsfmConfig c;
        c.sigma = 0.4;
        CHECK(r.best == c);
        CHECK(r.best_score == loo_cv_score(s, c, last).score);
    }
    SECTION("grid order does not change the winner") {
        GridSpec reversed = grid;
        std::reverse(reversed.n_values.begin(), reversed.n_values.end());
        std::reverse(reversed.sigma_values.begin(), reversed.sigma_values.end());
        std::reverse(reversed.k_values.begin(), reversed.k_values.end());
        for (ModelKind kind : {ModelKind::KNNW, ModelKind::FNM}) {
            CHECK(grid_search(s, kind, grid, last).best == grid_search(s, kind, reversed, last).best);
        }
    }
    SECTION("the search is deterministic") {
        auto a = grid_search(s, ModelKind::GRNN, grid, last);
        auto b = grid_search(s, ModelKind::GRNN, grid, last);
        CHECK(a.best == b.best);
        CHECK(a.best_score == b.best_score);
    }
    SECTION("infeasible cells are kept and reported") {
        GridSpec g = grid;
        g.n_values = {12, 400};
        auto r = grid_search(s, ModelKind::FNM, g, last);
        CHECK(r.table.size() == 4);
        CHECK_FALSE(r.table[3].feasible);
        std::ostringstream out;
        write_score_table(out, ModelKind::FNM, r.table);
        CHECK(out.str().rfind("n,sigma,score\n", 0) == 0);
        CHECK(out.str().find("400,0.8,NA\n") != std::string::npos);

        g.n_values = {400};
        CHECK_THROWS_AS(grid_search(s, ModelKind::FNM, g, last), TuningError);
    }
}

TEST_CASE("ties prefer shorter patterns and fewer neighbors", "[tuning]") {
    SyntheticParams p;
    p.years = 6;
    p.seasonal_amp = 0.3;
    auto s = generate_synthetic(p);
    GridSpec grid;
    grid.n_values = {12, 24};
    grid.k_values = {1, 2, 3};
    auto r = grid_search(s, ModelKind::KNNW, grid, s.size() - 1);
    // Every same-phase neighbor is exact, so all feasible cells score zero.
    for (const auto& cell : r.table) {
        if (cell.feasible) CHECK(cell.score < kScoreTieTolerance);
    }
    CHECK(r.best.n == 12);
    CHECK(r.best.k == 1);

    grid.sigma_values = {0.01, 0.02};
    auto f = grid_search(s, ModelKind::FNM, grid, s.size() - 1);
    CHECK(f.best.n == 12);
    CHECK(f.best.sigma == 0.02);
}

TEST_CASE("default grid shape", "[tuning]") {
    auto g = GridSpec::defaults();
    CHECK(g.n_values == std::vector<std::size_t>{3, 6, 9, 12, 15, 18, 24});
    CHECK(g.k_values.size() == 12);
    CHECK(g.sigma_values.front() == 0.05);
    CHECK(g.sigma_values.back() == 12.8);
    CHECK(g.candidates(ModelKind::FNM, {}).size() == 7 * 9);
    CHECK(g.candidates(ModelKind::KNNW, {}).size() == 7 * 12);
    auto nwe = g.candidates(ModelKind::NWE, {});
    CHECK(nwe.front().h == std::vector<double>(3, 0.05));
}
