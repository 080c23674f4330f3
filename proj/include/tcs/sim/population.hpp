#pragma once

#include <cmath>
#include <vector>

#include "tcs/common/rng.hpp"
#include "tcs/sim/config.hpp"
#include "tcs/sim/types.hpp"

namespace tcs {

// Samples the traveler population from the scenario's heterogeneity
// distributions. Incomes are lognormal around the configured median with a
// lower truncation; the time-preference weights scale with the per-minute
// wage so richer travelers value time more. Deterministic in
// `population_seed`.
inline std::vector<TravelerProfile> build_population(const ScenarioConfig& cfg) {
    cfg.validate();
    Rng rng(mix_seed(cfg.population_seed, 0x706f70756cULL));
    const double tau0 = cfg.free_flow_travel_time();
    const double meanlog = std::log(cfg.income_median);

    std::vector<TravelerProfile> travelers;
    travelers.reserve(static_cast<std::size_t>(cfg.population));
    for (int n = 0; n < cfg.population; ++n) {
        TravelerProfile t;
        t.id = n;

        t.income = std::max(cfg.income_floor, rng.lognormal(meanlog, cfg.income_sdlog));

        // desired arrival, truncated normal
        double arr = rng.normal(cfg.arrival_center, cfg.arrival_sd);
        while (arr < cfg.arrival_min || arr > cfg.arrival_max) {
            arr = rng.normal(cfg.arrival_center, cfg.arrival_sd);
        }
        t.desired_arrival = arr;

        t.trip_length = cfg.trip_length;
        if (cfg.trip_length_sdlog > 0.0) {
            t.trip_length = cfg.trip_length * std::exp(rng.normal(0.0, cfg.trip_length_sdlog));
        }

        // value of time: a share of the daily wage spread over an 8-hour day
        t.alpha = cfg.vot_ratio * t.income / 480.0;
        t.beta_early = cfg.beta_early_ratio * t.alpha;
        t.beta_late = cfg.beta_late_ratio * t.alpha;
        t.beta_wait = cfg.beta_wait_ratio * t.alpha;
        t.scale = cfg.logit_scale;

        t.desired_departure = static_cast<int>(std::lround(t.desired_arrival - tau0));
        t.window_step = cfg.departure_step_min;
        const int span = cfg.window_half_count * cfg.departure_step_min;
        int first = t.desired_departure - span;
        int last = t.desired_departure + span;
        // clip the window set to the commute period
        while (first < 0) first += t.window_step;
        while (last > kDayMinutes - 1) last -= t.window_step;
        t.first_window = first;
        t.n_windows = (last - first) / t.window_step + 1;

        // transit departure chosen so the ride plus expected wait ends on time
        t.pt_departure = std::max(
            0, static_cast<int>(std::lround(t.desired_arrival - cfg.pt_travel_time -
                                            cfg.pt_wait_time)));
        travelers.push_back(t);
    }
    return travelers;
}

}  // namespace tcs
