#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tcs/common/rng.hpp"
#include "tcs/sim/config.hpp"
#include "tcs/sim/demand.hpp"
#include "tcs/sim/learning.hpp"
#include "tcs/sim/market.hpp"
#include "tcs/sim/mfd.hpp"
#include "tcs/sim/population.hpp"
#include "tcs/sim/toll.hpp"
#include "tcs/sim/types.hpp"

namespace tcs {

// Full day-to-day state of the commute system: the sampled population, token
// wallets, perceived travel times per toll level, and the market price. One
// call to run_day advances the system by one day under the posted tariff.
//
// A System is strictly sequential; independent instances with independent
// random sources may run concurrently.
class System {
public:
    explicit System(ScenarioConfig cfg)
        : cfg_(std::move(cfg)), travelers_(build_population(cfg_)) {
        reset();
    }

    // Restores day-0 state (full wallets, free-flow beliefs, initial price)
    // without resampling the population.
    void reset() {
        const double tau0 = cfg_.free_flow_travel_time();
        wallets_.assign(travelers_.size(), TokenWallet{cfg_.full_wallet(), 0.0});
        perceptions_.clear();
        perceptions_.reserve(travelers_.size());
        for (const auto& t : travelers_) {
            perceptions_.emplace_back(t.n_windows, tau0);
        }
        market_ = MarketState{cfg_.market_enabled ? cfg_.initial_price : 0.0,
                              0.0,
                              cfg_.price_step,
                              cfg_.revenue_threshold,
                              cfg_.allocation_rate,
                              cfg_.token_lifetime};
        day_ = 0;
    }

    // Simulates one day: mode and departure choices, traffic, market
    // settlement, the price update, and perception learning. Deterministic
    // given the rng state.
    DayOutcome run_day(const TollProfile& toll, Rng& rng) {
        toll.validate();
        const double day_start = static_cast<double>(day_) * kDayMinutes;
        const int level = toll_level(toll.amplitude);

        std::vector<double> toll_by_minute(kDayMinutes);
        for (int m = 0; m < kDayMinutes; ++m) {
            toll_by_minute[static_cast<std::size_t>(m)] =
                toll.at(static_cast<double>(m));
        }

        const std::vector<Choice> choices =
            choose_all(toll_by_minute, level, day_start, rng);
        DayOutcome out = simulate_mfd_day(choices, travelers_, cfg_);
        out.day = day_;
        out.toll = toll;
        out.price = market_.price;

        out.welfare_per_capita = realized_welfare(out, toll_by_minute, day_start);

        if (cfg_.market_enabled) {
            Settlement s = settle_market(choices, travelers_, toll_by_minute, wallets_,
                                         market_, day_start);
            out.transactions = std::move(s.transactions);
            out.net_revenue = s.net_revenue;
            market_ = adjust_price(market_, s.net_revenue);
        }

        update_perceptions(perceptions_, travelers_, out, level, cfg_.perception_weight);
        ++day_;
        return out;
    }

    const ScenarioConfig& config() const { return cfg_; }
    const std::vector<TravelerProfile>& travelers() const { return travelers_; }
    const std::vector<TokenWallet>& wallets() const { return wallets_; }
    const std::vector<PerceptionTable>& perceptions() const { return perceptions_; }
    const MarketState& market() const { return market_; }
    int day() const { return day_; }

private:
    std::vector<Choice> choose_all(const std::vector<double>& toll_by_minute, int level,
                                   double day_start, Rng& rng) const {
        std::vector<Choice> choices(travelers_.size());
        const double fw = market_.full_wallet();
        std::vector<double> utilities;
        for (std::size_t i = 0; i < travelers_.size(); ++i) {
            const TravelerProfile& t = travelers_[i];
            const std::vector<int> windows =
                feasible_windows(t, toll_by_minute, wallets_[i], market_, cfg_.fuel_cost,
                                 day_start, cfg_.income_effect_offset);

            // alternatives: feasible car windows in ascending order, then transit
            utilities.clear();
            utilities.reserve(windows.size() + 1);
            std::vector<int> offered;
            offered.reserve(windows.size());
            for (int k : windows) {
                const int minute = t.window_minute(k);
                const double balance = wallets_[i].balance_at(
                    day_start + minute, market_.allocation_rate, fw);
                const double cost = car_cost(
                    toll_by_minute[static_cast<std::size_t>(minute)], balance,
                    market_.price, cfg_.fuel_cost, fw, cfg_.literal_sell_cost);
                // the literal surplus cost can exceed the screening cost, so
                // re-check the income block stays inside the log domain
                if (cfg_.literal_sell_cost &&
                    cfg_.income_effect_offset + t.income - 2.0 * cost <= 0.0) {
                    continue;
                }
                offered.push_back(k);
                utilities.push_back(car_utility(
                    t, static_cast<double>(minute), perceptions_[i].at(level, k), cost,
                    cfg_.income_effect_coef, cfg_.income_effect_offset, cfg_.arrival_flex,
                    cfg_.literal_travel_time_sign));
            }
            const double transit_cost = pt_cost(market_.price, fw, cfg_.pt_fare);
            const bool transit_ok =
                t.income - 2.0 * transit_cost >= 0.0 &&
                cfg_.income_effect_offset + t.income - 2.0 * transit_cost > 0.0;
            if (transit_ok) {
                utilities.push_back(pt_utility(t, transit_cost, cfg_.pt_travel_time,
                                               cfg_.pt_wait_time, cfg_.income_effect_coef,
                                               cfg_.income_effect_offset));
            }

            if (utilities.empty()) {
                throw std::runtime_error("traveler " + std::to_string(t.id) +
                                         " has no affordable alternative");
            }
            const std::vector<double> probs = choice_probabilities(utilities, t.scale);
            const std::size_t pick = sample_index(probs, rng.uniform());
            if (pick < offered.size()) {
                choices[i] = Choice{Mode::kCar, t.window_minute(offered[pick])};
            } else {
                choices[i] = Choice{Mode::kPt, t.pt_departure};
            }
        }
        return choices;
    }

    // inverse-CDF draw over the ordered alternatives
    static std::size_t sample_index(const std::vector<double>& probs, double u) {
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return probs.size() - 1;
    }

    // Mean realized systematic utility of the chosen alternatives, in
    // dollars. Uses actual cash flows: the balance held at the trade minute,
    // not the traveler's forecast heuristic.
    double realized_welfare(const DayOutcome& out,
                            const std::vector<double>& toll_by_minute,
                            double day_start) const {
        if (travelers_.empty()) return 0.0;
        const double fw = market_.full_wallet();
        double total = 0.0;
        for (std::size_t i = 0; i < travelers_.size(); ++i) {
            const TravelerProfile& t = travelers_[i];
            const Choice& c = out.choices[i];
            if (c.mode == Mode::kCar) {
                const double balance = wallets_[i].balance_at(
                    day_start + c.window, market_.allocation_rate, fw);
                const double cost =
                    (toll_by_minute[static_cast<std::size_t>(c.window)] - balance) *
                        market_.price +
                    cfg_.fuel_cost;
                total += car_utility(t, static_cast<double>(c.window), out.travel_time[i],
                                     cost, cfg_.income_effect_coef,
                                     cfg_.income_effect_offset, cfg_.arrival_flex,
                                     cfg_.literal_travel_time_sign);
            } else {
                const double balance = wallets_[i].balance_at(
                    day_start + t.pt_departure, market_.allocation_rate, fw);
                const double cost = -balance * market_.price + cfg_.pt_fare;
                total += pt_utility(t, cost, cfg_.pt_travel_time, cfg_.pt_wait_time,
                                    cfg_.income_effect_coef, cfg_.income_effect_offset);
            }
        }
        return total / static_cast<double>(travelers_.size());
    }

    ScenarioConfig cfg_;
    std::vector<TravelerProfile> travelers_;
    std::vector<TokenWallet> wallets_;
    std::vector<PerceptionTable> perceptions_;
    MarketState market_;
    int day_ = 0;
};

}  // namespace tcs
