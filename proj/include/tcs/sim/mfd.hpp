#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "tcs/sim/config.hpp"
#include "tcs/sim/types.hpp"

namespace tcs {

// Network speed at the given accumulation: quadratic decay from the free-flow
// speed, zero at jam accumulation and beyond.
inline double mfd_speed(double accumulation, double jam_accumulation,
                        double free_flow_speed) {
    const double x = std::min(accumulation, jam_accumulation) / jam_accumulation;
    const double f = 1.0 - x;
    return free_flow_speed * f * f;
}

// Single-reservoir trip-based traffic dynamics for one day. Car travelers
// enter the accumulation at their departure minute and leave once the
// distance integrated over the realized speed covers their trip length; the
// speed each minute is set by the accumulation after that minute's entries.
// Trips still running at the horizon are finished at the last minute's speed
// (floored away from zero) and flag the day as overrun.
//
// Travel times for ALL travelers and windows, realized or hypothetical, are
// read from the returned cumulative-distance curve, so probing an unchosen
// window can never perturb the dynamics.
inline DayOutcome simulate_mfd_day(const std::vector<Choice>& choices,
                                   const std::vector<TravelerProfile>& travelers,
                                   const ScenarioConfig& cfg) {
    DayOutcome out;
    out.choices = choices;
    const std::size_t n = travelers.size();
    out.travel_time.assign(n, 0.0);
    out.departure_flows.assign(kFlowBins, 0.0);

    // entries per minute: (minute -> trip lengths)
    std::vector<std::vector<double>> entries(kDayMinutes);
    for (std::size_t i = 0; i < n; ++i) {
        if (choices[i].mode == Mode::kCar) {
            entries[static_cast<std::size_t>(choices[i].window)].push_back(
                travelers[i].trip_length);
            out.departure_flows[static_cast<std::size_t>(choices[i].window / kFlowBinMinutes)] +=
                1.0;
            ++out.car_count;
        }
    }

    SpeedCurve curve;
    curve.cum_distance.assign(kDayMinutes + 1, 0.0);
    curve.speeds.assign(kDayMinutes, 0.0);

    // exit targets on the cumulative-distance axis, smallest first
    std::priority_queue<double, std::vector<double>, std::greater<double>> active;
    for (int t = 0; t < kDayMinutes; ++t) {
        for (double miles : entries[static_cast<std::size_t>(t)]) {
            active.push(curve.cum_distance[static_cast<std::size_t>(t)] + miles);
        }
        // each vehicle is slowed by the others: a lone trip runs at free flow
        const double crowd =
            active.empty() ? 0.0 : static_cast<double>(active.size()) - 1.0;
        const double v =
            mfd_speed(crowd, cfg.jam_accumulation, cfg.free_flow_speed_car);
        curve.speeds[static_cast<std::size_t>(t)] = v;
        curve.cum_distance[static_cast<std::size_t>(t + 1)] =
            curve.cum_distance[static_cast<std::size_t>(t)] + v / 60.0;
        while (!active.empty() &&
               active.top() <= curve.cum_distance[static_cast<std::size_t>(t + 1)]) {
            active.pop();
        }
    }
    curve.overrun = !active.empty();
    // finish leftover trips at the final speed; floor keeps gridlocked days finite
    curve.tail_speed =
        std::max(curve.speeds.back(), cfg.free_flow_speed_car * 1e-3);
    out.overrun = curve.overrun;

    double total_tt = 0.0;
    double car_tt = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (choices[i].mode == Mode::kCar) {
            out.travel_time[i] =
                curve.travel_time(choices[i].window, travelers[i].trip_length);
            car_tt += out.travel_time[i];
        } else {
            out.travel_time[i] = cfg.pt_travel_time;
        }
        total_tt += out.travel_time[i];
    }
    out.aitt = n > 0 ? total_tt / static_cast<double>(n) : 0.0;
    out.car_aitt = out.car_count > 0 ? car_tt / out.car_count : 0.0;
    out.pt_share =
        n > 0 ? static_cast<double>(n - static_cast<std::size_t>(out.car_count)) /
                    static_cast<double>(n)
              : 0.0;
    out.curve = std::move(curve);
    return out;
}

}  // namespace tcs
