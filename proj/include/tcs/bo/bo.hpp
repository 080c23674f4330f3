#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcs/bo/gp.hpp"
#include "tcs/common/rng.hpp"
#include "tcs/mdp/env.hpp"
#include "tcs/sim/system.hpp"

namespace tcs::bo {

struct Bound {
    double lo = 0.0;
    double hi = 1.0;
};

// Tariff-parameter search spaces: amplitude only, or all three parameters.
inline std::vector<Bound> toll_bounds(int dims) {
    if (dims == 1) {
        return {{TollBounds::min_amplitude, TollBounds::max_amplitude}};
    }
    if (dims == 3) {
        return {{TollBounds::min_amplitude, TollBounds::max_amplitude},
                {TollBounds::min_center, TollBounds::max_center},
                {TollBounds::min_width, TollBounds::max_width}};
    }
    throw std::invalid_argument("search dimension must be 1 or 3");
}

// Halton low-discrepancy sequence point (1-based index).
inline double halton(long index, int base) {
    double f = 1.0;
    double r = 0.0;
    long i = index;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

inline std::vector<double> normalize_point(const std::vector<double>& p,
                                           const std::vector<Bound>& bounds) {
    std::vector<double> u(p.size());
    for (std::size_t d = 0; d < p.size(); ++d) {
        u[d] = (p[d] - bounds[d].lo) / (bounds[d].hi - bounds[d].lo);
    }
    return u;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
}

// Expected improvement over `best` for a maximization problem.
inline double expected_improvement(const GpPrediction& p, double best) {
    const double sd = std::sqrt(p.var);
    const double imp = p.mean - best;
    if (sd < 1e-12) return std::max(imp, 0.0);
    const double z = imp / sd;
    return imp * normal_cdf(z) + sd * normal_pdf(z);
}

// Proposes the next evaluation point: the expected-improvement argmax over a
// fixed 1024-point Halton grid inside the bounds. Degenerate acquisitions
// (no surrogate yet, or everywhere-zero improvement) fall back to a random
// in-bounds point.
inline std::vector<double> propose_next(const GpSurrogate* gp,
                                        const std::vector<Bound>& bounds, Rng& rng,
                                        double best_objective) {
    const int dims = static_cast<int>(bounds.size());
    auto random_point = [&]() {
        std::vector<double> p(static_cast<std::size_t>(dims));
        for (int d = 0; d < dims; ++d) {
            p[static_cast<std::size_t>(d)] = rng.uniform(bounds[static_cast<std::size_t>(d)].lo,
                                                         bounds[static_cast<std::size_t>(d)].hi);
        }
        return p;
    };
    if (gp == nullptr) return random_point();

    static constexpr int kGridSize = 1024;
    static constexpr int kBases[3] = {2, 3, 5};
    std::vector<double> best_point;
    double best_ei = 0.0;
    std::vector<double> u(static_cast<std::size_t>(dims));
    std::vector<double> p(static_cast<std::size_t>(dims));
    for (int i = 1; i <= kGridSize; ++i) {
        for (int d = 0; d < dims; ++d) {
            u[static_cast<std::size_t>(d)] = halton(i, kBases[d]);
            p[static_cast<std::size_t>(d)] =
                bounds[static_cast<std::size_t>(d)].lo +
                u[static_cast<std::size_t>(d)] *
                    (bounds[static_cast<std::size_t>(d)].hi - bounds[static_cast<std::size_t>(d)].lo);
        }
        const double ei = expected_improvement(gp->predict(u), best_objective);
        if (ei > best_ei) {
            best_ei = ei;
            best_point = p;
        }
    }
    if (best_ei <= 1e-15) return random_point();  // flat acquisition: random tie-break
    return best_point;
}

struct BoRecord {
    int iteration = 0;  // negative-free: 0-based over init + optimization phases
    std::vector<double> params;
    double objective = 0.0;
    double running_best = 0.0;
};

struct BoResult {
    std::vector<double> best_params;
    double best_objective = 0.0;
    std::vector<BoRecord> history;
};

// Surrogate-guided maximization of a black-box objective: a random initial
// design followed by expected-improvement proposals, refitting the surrogate
// on every observation.
inline BoResult run_bo(const std::function<double(const std::vector<double>&)>& objective,
                       const std::vector<Bound>& bounds, int n_init, int n_iter,
                       Rng& rng) {
    if (n_init < 1) throw std::invalid_argument("need at least one initial sample");
    BoResult result;
    std::vector<std::vector<double>> xs_norm;
    std::vector<double> ys;
    result.best_objective = -1e300;

    auto observe = [&](const std::vector<double>& p, int iteration) {
        const double y = objective(p);
        xs_norm.push_back(normalize_point(p, bounds));
        ys.push_back(y);
        if (y > result.best_objective) {
            result.best_objective = y;
            result.best_params = p;
        }
        result.history.push_back(BoRecord{iteration, p, y, result.best_objective});
    };

    int iteration = 0;
    for (int i = 0; i < n_init; ++i) {
        observe(propose_next(nullptr, bounds, rng, 0.0), iteration++);
    }
    for (int i = 0; i < n_iter; ++i) {
        const GpSurrogate gp = GpSurrogate::fit(xs_norm, ys);
        observe(propose_next(&gp, bounds, rng, result.best_objective), iteration++);
    }
    return result;
}

// Simulates `days` consecutive days under a per-day tariff schedule and
// returns the daily outcomes. The schedule sees the day index.
inline std::vector<DayOutcome> run_schedule(
    const ScenarioConfig& scenario, const std::function<TollProfile(int)>& schedule,
    std::uint64_t seed, int days) {
    System system(scenario);
    Rng rng(mix_seed(seed, 0x646179ULL));
    std::vector<DayOutcome> trace;
    trace.reserve(static_cast<std::size_t>(days));
    for (int d = 0; d < days; ++d) trace.push_back(system.run_day(schedule(d), rng));
    return trace;
}

// Mean day-reward over the final `window` days of a fixed-tariff run; the
// objective the surrogate search maximizes. Deterministic per seed.
inline double evaluate_objective(const TollProfile& toll, const ScenarioConfig& scenario,
                                 std::uint64_t seed, int days = 60, int window = 6,
                                 double pt_target = 0.1) {
    toll.validate();
    const auto trace = run_schedule(scenario, [&toll](int) { return toll; }, seed, days);
    const double tau0 = scenario.free_flow_travel_time();
    double sum = 0.0;
    for (int d = days - window; d < days; ++d) {
        const auto& out = trace[static_cast<std::size_t>(d)];
        sum += mdp::day_reward(out.aitt, out.pt_share, tau0, pt_target);
    }
    return sum / static_cast<double>(window);
}

// The no-tolling reference: zero tariff with the token market switched off.
inline ScenarioConfig no_toll_scenario(ScenarioConfig scenario) {
    scenario.market_enabled = false;
    scenario.initial_price = 0.0;
    return scenario;
}

inline std::vector<DayOutcome> run_no_toll(const ScenarioConfig& scenario,
                                           std::uint64_t seed, int days = 60) {
    return run_schedule(no_toll_scenario(scenario),
                        [](int) { return TollProfile{0.0, 420.0, 60.0}; }, seed, days);
}

// Random-tariff baseline: a fresh uniform amplitude every day, center and
// width at their defaults.
inline std::vector<DayOutcome> run_random_toll(const ScenarioConfig& scenario,
                                               std::uint64_t seed, int days = 60,
                                               double fixed_center = 420.0,
                                               double fixed_width = 60.0) {
    Rng toll_rng(mix_seed(seed, 0x72616e64ULL));
    std::vector<TollProfile> schedule;
    schedule.reserve(static_cast<std::size_t>(days));
    for (int d = 0; d < days; ++d) {
        schedule.push_back(TollProfile{toll_rng.uniform(0.0, 7.0), fixed_center, fixed_width});
    }
    return run_schedule(scenario, [&schedule](int d) { return schedule[static_cast<std::size_t>(d)]; },
                        seed, days);
}

}  // namespace tcs::bo
