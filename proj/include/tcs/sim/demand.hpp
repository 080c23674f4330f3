#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tcs/sim/config.hpp"
#include "tcs/sim/toll.hpp"
#include "tcs/sim/types.hpp"

namespace tcs {

struct ScheduleDelay {
    double early = 0.0;  // minutes ahead of the tolerated arrival window
    double late = 0.0;   // minutes behind it
};

// Early/late arrival slack relative to the desired arrival, given departure
// at `window_start` and an anticipated travel time. At most one of the two is
// nonzero when the flexibility margin is nonnegative.
inline ScheduleDelay schedule_delays(double window_start, double arrival_flex,
                                     double desired_arrival, double travel_time) {
    const double arrival = window_start + travel_time;
    return ScheduleDelay{std::max(0.0, desired_arrival - arrival_flex - arrival),
                         std::max(0.0, arrival - desired_arrival - arrival_flex)};
}

// Dollar cost of driving in a window with tariff `toll` (tokens), given the
// token balance the traveler expects to hold at departure. A surplus is sold
// back at the posted price, so the token term can be negative. With
// `literal_sell_cost` the surplus branch instead charges (full_wallet -
// toll) * price, reproducing the uncorrected sell formula.
inline double car_cost(double toll, double expected_balance, double price,
                       double fuel_cost, double full_wallet = 0.0,
                       bool literal_sell_cost = false) {
    double token_cost;
    if (literal_sell_cost && expected_balance >= toll) {
        token_cost = (full_wallet - toll) * price;
    } else {
        token_cost = (toll - expected_balance) * price;
    }
    return token_cost + fuel_cost;
}

// Transit cost: the fare minus the proceeds of selling a full wallet.
inline double pt_cost(double price, double full_wallet, double fare) {
    return -price * full_wallet + fare;
}

// Income block shared by both modes: disposable income after round-trip cost
// plus a concave income-effect adjustment.
inline double income_term(double income, double cost, double income_effect_coef,
                          double income_effect_offset) {
    const double residual = income - 2.0 * cost;
    return residual + income_effect_coef * std::log(income_effect_offset + residual);
}

// Systematic utility of driving: anticipated round-trip travel time, schedule
// delays against the desired arrival, and the income block. Travel time
// enters as a disutility; `literal_travel_time_sign` flips it to the
// uncorrected positive sign.
inline double car_utility(const TravelerProfile& t, double window_start,
                          double perceived_tt, double cost,
                          double income_effect_coef, double income_effect_offset,
                          double arrival_flex = 0.0,
                          bool literal_travel_time_sign = false) {
    const ScheduleDelay sd =
        schedule_delays(window_start, arrival_flex, t.desired_arrival, perceived_tt);
    const double tt_sign = literal_travel_time_sign ? 1.0 : -1.0;
    return tt_sign * 2.0 * t.alpha * perceived_tt - t.beta_early * sd.early -
           t.beta_late * sd.late +
           income_term(t.income, cost, income_effect_coef, income_effect_offset);
}

// Systematic utility of transit: fixed ride and expected wait, no schedule
// delay, and the same income block.
inline double pt_utility(const TravelerProfile& t, double cost, double pt_travel_time,
                         double pt_wait_time, double income_effect_coef,
                         double income_effect_offset) {
    return -2.0 * t.alpha * pt_travel_time - 2.0 * t.beta_wait * pt_wait_time +
           income_term(t.income, cost, income_effect_coef, income_effect_offset);
}

// Car departure windows the traveler can afford. A window is kept when the
// disposable income covers twice the expected cost (round trip), evaluated
// with the deficit-purchase token cost; the boundary is admitted. Throws when
// a traveler ends up with no affordable window, which the admissible toll and
// income ranges are meant to preclude.
inline std::vector<int> feasible_windows(const TravelerProfile& t,
                                         const std::vector<double>& toll_by_minute,
                                         const TokenWallet& wallet,
                                         const MarketState& market,
                                         double fuel_cost, double day_start_abs,
                                         double income_effect_offset) {
    std::vector<int> feasible;
    feasible.reserve(static_cast<std::size_t>(t.n_windows));
    const double fw = market.full_wallet();
    for (int k = 0; k < t.n_windows; ++k) {
        const int minute = t.window_minute(k);
        const double balance =
            wallet.balance_at(day_start_abs + minute, market.allocation_rate, fw);
        const double cost = (toll_by_minute[static_cast<std::size_t>(minute)] - balance) *
                                market.price +
                            fuel_cost;
        if (t.income - 2.0 * cost >= 0.0 &&
            income_effect_offset + t.income - 2.0 * cost > 0.0) {
            feasible.push_back(k);
        }
    }
    if (feasible.empty()) {
        throw std::runtime_error(
            "no affordable departure window for traveler " + std::to_string(t.id) +
            " (income " + std::to_string(t.income) + ", price " +
            std::to_string(market.price) + "); widen toll bounds or raise incomes");
    }
    return feasible;
}

// Multinomial logit choice probabilities over the utilities, with the
// traveler's scale. Shifted by the maximum before exponentiation.
inline std::vector<double> choice_probabilities(const std::vector<double>& utilities,
                                                double scale) {
    if (utilities.empty()) throw std::invalid_argument("no alternatives to choose from");
    double vmax = utilities[0];
    for (double v : utilities) vmax = std::max(vmax, v);
    std::vector<double> probs(utilities.size());
    double total = 0.0;
    for (std::size_t i = 0; i < utilities.size(); ++i) {
        probs[i] = std::exp(scale * (utilities[i] - vmax));
        total += probs[i];
    }
    for (double& p : probs) p /= total;
    return probs;
}

}  // namespace tcs
