#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "tcs/sim/config.hpp"
#include "tcs/sim/types.hpp"

namespace tcs {

// Tariff amplitudes are discretized into unit levels; travelers keep separate
// travel time beliefs per level, since the same departure minute congests
// differently under different tolls.
inline int toll_level(double amplitude) {
    return std::clamp(static_cast<int>(std::lround(amplitude)), 0, kTollLevels - 1);
}

// Per-traveler table of perceived car travel times, indexed by (toll level,
// departure window). Updating one level leaves every other level untouched.
class PerceptionTable {
public:
    PerceptionTable() = default;
    PerceptionTable(int n_windows, double initial_tt)
        : n_windows_(n_windows),
          tt_(static_cast<std::size_t>(kTollLevels) * static_cast<std::size_t>(n_windows),
              initial_tt) {}

    double at(int level, int window_idx) const {
        return tt_[static_cast<std::size_t>(level) * static_cast<std::size_t>(n_windows_) +
                   static_cast<std::size_t>(window_idx)];
    }

    void blend(int level, int window_idx, double observed_tt, double weight) {
        double& v = tt_[static_cast<std::size_t>(level) * static_cast<std::size_t>(n_windows_) +
                        static_cast<std::size_t>(window_idx)];
        v = (1.0 - weight) * v + weight * observed_tt;
    }

    int n_windows() const { return n_windows_; }
    const std::vector<double>& raw() const { return tt_; }

private:
    int n_windows_ = 0;
    std::vector<double> tt_;
};

// Day-to-day learning step: at the level of the tariff just experienced, the
// chosen window blends toward the realized travel time and every other window
// toward the time a virtual traveler departing there would have seen.
inline void update_perceptions(std::vector<PerceptionTable>& perceptions,
                               const std::vector<TravelerProfile>& travelers,
                               const DayOutcome& outcome, int level, double weight) {
    for (std::size_t i = 0; i < travelers.size(); ++i) {
        const TravelerProfile& t = travelers[i];
        const Choice& c = outcome.choices[i];
        const bool drove = c.mode == Mode::kCar;
        for (int k = 0; k < t.n_windows; ++k) {
            const int minute = t.window_minute(k);
            const double observed = (drove && minute == c.window)
                                        ? outcome.travel_time[i]
                                        : outcome.curve.travel_time(minute, t.trip_length);
            perceptions[i].blend(level, k, observed, weight);
        }
    }
}

}  // namespace tcs
