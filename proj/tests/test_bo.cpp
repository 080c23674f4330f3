#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "tcs/bo/bo.hpp"
#include "tcs/common/rng.hpp"

using namespace tcs;
using namespace tcs::bo;

TEST_CASE("gp reproduces constant data away from noise") {
    std::vector<std::vector<double>> x = {{0.1}, {0.3}, {0.5}, {0.7}, {0.9}};
    std::vector<double> y(5, 2.5);
    auto gp = GpSurrogate::fit(x, y);
    for (double q : {0.2, 0.4, 0.6, 0.8}) {
        auto p = gp.predict({q});
        CHECK(p.mean == doctest::Approx(2.5).epsilon(1e-6));
    }
}

TEST_CASE("gp interpolates observations within the noise level") {
    Rng rng(5);
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < 12; ++i) {
        const double xi = i / 11.0;
        x.push_back({xi});
        y.push_back(std::sin(4.0 * xi));
    }
    auto gp = GpSurrogate::fit(x, y);
    const double noise_sd = std::sqrt(gp.hyperparams().noise_var);
    for (std::size_t i = 0; i < x.size(); ++i) {
        auto p = gp.predict(x[i]);
        CHECK(std::abs(p.mean - y[i]) <= 5.0 * noise_sd + 1e-6);
    }
}

TEST_CASE("gp generalizes a sine from ten samples") {
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < 10; ++i) {
        const double xi = (i + 0.5) / 10.0;
        x.push_back({xi});
        y.push_back(std::sin(2.0 * 3.14159265358979 * xi));
    }
    auto gp = GpSurrogate::fit(x, y);
    const double prior_sd = std::sqrt(gp.hyperparams().signal_var);
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
        const double q = rng.uniform(0.05, 0.95);
        auto p = gp.predict({q});
        CHECK(std::abs(p.mean - std::sin(2.0 * 3.14159265358979 * q)) < prior_sd);
    }
}

TEST_CASE("gp posterior variance is nonnegative at many query points") {
    Rng rng(31);
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < 40; ++i) {
        x.push_back({rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
        y.push_back(rng.uniform(-3.0, 3.0));
    }
    auto gp = GpSurrogate::fit(x, y);
    for (int i = 0; i < 10000; ++i) {
        auto p = gp.predict({rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2),
                             rng.uniform(-0.2, 1.2)});
        CHECK(p.var >= 0.0);
    }
}

TEST_CASE("gp requires two points and jitters exact duplicates") {
    CHECK_THROWS(GpSurrogate::fit({{0.5}}, {1.0}));
    // duplicate inputs with conflicting targets still factorize
    auto gp = GpSurrogate::fit({{0.5}, {0.5}, {0.7}}, {1.0, 2.0, 0.0});
    auto p = gp.predict({0.5});
    CHECK(std::isfinite(p.mean));
    CHECK(p.var >= 0.0);
}

TEST_CASE("proposals stay inside bounds and fall back to random sensibly") {
    Rng rng(3);
    const auto bounds = toll_bounds(1);
    // no surrogate: random in-bounds sample
    for (int i = 0; i < 20; ++i) {
        auto p = propose_next(nullptr, bounds, rng, 0.0);
        REQUIRE(p.size() == 1);
        CHECK(p[0] >= 0.0);
        CHECK(p[0] <= 7.0);
    }
    // constant surrogate: zero improvement everywhere, random tie-break
    auto flat = GpSurrogate::fit({{0.1}, {0.5}, {0.9}}, {1.0, 1.0, 1.0});
    for (int i = 0; i < 20; ++i) {
        auto p = propose_next(&flat, bounds, rng, 5.0);  // best far above the data
        CHECK(p[0] >= 0.0);
        CHECK(p[0] <= 7.0);
    }
}

TEST_CASE("expected improvement is zero at a perfectly known dominated point") {
    GpPrediction p{0.0, 0.0};
    CHECK(expected_improvement(p, 1.0) == 0.0);
    GpPrediction better{2.0, 0.0};
    CHECK(expected_improvement(better, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("surrogate search recovers a known quadratic optimum") {
    Rng rng(17);
    auto objective = [](const std::vector<double>& p) {
        return -(p[0] - 3.0) * (p[0] - 3.0);
    };
    auto result = run_bo(objective, toll_bounds(1), 10, 20, rng);
    CHECK(std::abs(result.best_params[0] - 3.0) <= 0.1);

    // bookkeeping: the running best never decreases and params stay bounded
    double best = -1e300;
    for (const auto& rec : result.history) {
        best = std::max(best, rec.objective);
        CHECK(rec.running_best == doctest::Approx(best));
        CHECK(rec.params[0] >= 0.0);
        CHECK(rec.params[0] <= 7.0);
    }
    CHECK(result.history.size() == 30);
}

TEST_CASE("zero-iteration budget returns the best of the initial design") {
    Rng rng(7);
    auto objective = [](const std::vector<double>& p) { return -std::abs(p[0] - 2.0); };
    auto result = run_bo(objective, toll_bounds(1), 10, 0, rng);
    CHECK(result.history.size() == 10);
    double best = -1e300;
    for (const auto& rec : result.history) best = std::max(best, rec.objective);
    CHECK(result.best_objective == doctest::Approx(best));
}

TEST_CASE("fixed-tariff objective is deterministic and zero toll matches the market run") {
    ScenarioConfig cfg = desk_scale_scenario();
    cfg.population = 80;
    cfg.jam_accumulation = 75.0;

    const TollProfile toll{2.5, 430.0, 60.0};
    const double a = evaluate_objective(toll, cfg, 11, 20, 6);
    const double b = evaluate_objective(toll, cfg, 11, 20, 6);
    CHECK(a == b);

    // amplitude zero with a zero starting price reproduces the no-toll world
    ScenarioConfig zero_price = cfg;
    zero_price.initial_price = 0.0;
    const double with_market =
        evaluate_objective(TollProfile{0.0, 420.0, 60.0}, zero_price, 11, 20, 6);
    const auto nt_trace = run_no_toll(cfg, 11, 20);
    double nt = 0.0;
    for (int d = 14; d < 20; ++d) {
        nt += mdp::day_reward(nt_trace[static_cast<std::size_t>(d)].aitt,
                              nt_trace[static_cast<std::size_t>(d)].pt_share,
                              cfg.free_flow_travel_time(), 0.1);
    }
    nt /= 6.0;
    CHECK(with_market == doctest::Approx(nt).epsilon(1e-12));
}

TEST_CASE("no-toll baseline with one traveler settles at free flow") {
    ScenarioConfig cfg = desk_scale_scenario();
    cfg.population = 1;
    cfg.logit_scale = 100.0;  // deterministic choice: driving dominates
    auto trace = run_no_toll(cfg, 3, 10);
    for (const auto& day : trace) {
        CHECK(day.aitt == doctest::Approx(24.0).epsilon(1e-15));
        CHECK(day.net_revenue == 0.0);
        CHECK(day.price == 0.0);
    }
}

TEST_CASE("random-tariff baseline is reproducible and in bounds") {
    ScenarioConfig cfg = desk_scale_scenario();
    cfg.population = 50;
    cfg.jam_accumulation = 47.0;
    auto a = run_random_toll(cfg, 5, 15);
    auto b = run_random_toll(cfg, 5, 15);
    REQUIRE(a.size() == 15);
    for (std::size_t d = 0; d < a.size(); ++d) {
        CHECK(a[d].toll.amplitude == b[d].toll.amplitude);
        CHECK(a[d].aitt == b[d].aitt);
        CHECK(a[d].toll.amplitude >= 0.0);
        CHECK(a[d].toll.amplitude <= 7.0);
    }
}
