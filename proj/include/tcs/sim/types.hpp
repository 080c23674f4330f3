#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tcs/sim/config.hpp"
#include "tcs/sim/toll.hpp"

namespace tcs {

enum class Mode : uint8_t { kCar = 0, kPt = 1 };

// One traveler's preferences and trip description. Marginal utilities are in
// dollars per minute; the schedule-delay weights bracket the travel time
// weight (early <= travel <= late).
struct TravelerProfile {
    int id = 0;
    double trip_length = 18.0;       // miles
    double desired_arrival = 480.0;  // minute-of-day
    int desired_departure = 456;     // minute-of-day, start of the home window
    double income = 100.0;           // dollars per day
    double alpha = 0.05;             // travel time, $/min
    double beta_early = 0.03;        // early arrival, $/min
    double beta_late = 0.12;         // late arrival, $/min
    double beta_wait = 0.075;        // transit waiting, $/min
    double scale = 1.0;              // logit scale
    int first_window = 396;          // earliest car departure window (minute)
    int n_windows = 121;             // number of car departure windows
    int window_step = 1;             // minutes between consecutive windows
    int pt_departure = 415;          // transit departure minute

    int window_minute(int k) const { return first_window + k * window_step; }
};

// Token account. Tokens accrue continuously at the allocation rate and cap at
// the full wallet; `last_update` is in absolute minutes (day * 720 + minute).
struct TokenWallet {
    double balance = 0.0;
    double last_update = 0.0;

    double balance_at(double t_abs, double rate, double full_wallet) const {
        return std::min(full_wallet, balance + rate * (t_abs - last_update));
    }

    void advance_to(double t_abs, double rate, double full_wallet) {
        balance = balance_at(t_abs, rate, full_wallet);
        last_update = t_abs;
    }
};

// Regulator-side market state: the posted token price and the adjustment rule
// parameters. The price moves one step per day only when the net revenue
// leaves the dead band [-revenue_threshold, revenue_threshold].
struct MarketState {
    double price = 1.0;              // dollars per token
    double net_revenue = 0.0;        // dollars, most recent settled day
    double price_step = 0.05;        // dollars
    double revenue_threshold = 200;  // dollars
    double allocation_rate = 0.00269;  // tokens per minute
    double token_lifetime = 720.0;     // minutes

    double full_wallet() const { return allocation_rate * token_lifetime; }
};

enum class TransactionKind : uint8_t { kBuy = 0, kSell = 1 };

// One dollar-denominated trade with the regulator.
struct Transaction {
    int traveler = 0;
    double minute = 0.0;  // minute-of-day of the trade
    TransactionKind kind = TransactionKind::kBuy;
    double tokens = 0.0;
    double dollars = 0.0;  // positive: regulator revenue; negative: payout
};

struct Choice {
    Mode mode = Mode::kCar;
    int window = 0;  // departure minute for car; transit departure for PT
};

// Realized network speed trajectory of one day. `cum_distance[t]` is the
// distance (miles) a vehicle continuously in the network would have covered
// by minute t; probes into unchosen departure minutes reuse it, so virtual
// travelers never feed back into the traffic dynamics.
struct SpeedCurve {
    std::vector<double> cum_distance;  // size kDayMinutes + 1, monotone
    std::vector<double> speeds;        // mph per minute, size kDayMinutes
    double tail_speed = 0.0;           // mph used to finish trips past the horizon
    bool overrun = false;              // any real trip unfinished at the horizon

    // Travel time in minutes for a trip of `miles` entering at `minute`.
    double travel_time(int minute, double miles) const {
        const double target = cum_distance[minute] + miles;
        const auto it = std::lower_bound(cum_distance.begin() + minute + 1,
                                         cum_distance.end(), target);
        if (it != cum_distance.end()) {
            return static_cast<double>(it - cum_distance.begin()) - minute;
        }
        const double remaining = target - cum_distance.back();
        return (kDayMinutes - minute) + remaining / (tail_speed / 60.0);
    }
};

// Everything observable about one simulated day.
struct DayOutcome {
    int day = 0;
    TollProfile toll;
    double price = 0.0;  // dollars per token used for this day's trades
    std::vector<Choice> choices;
    std::vector<double> travel_time;      // minutes per traveler (PT riders: fixed)
    std::vector<double> departure_flows;  // car departures per 5-minute bin
    SpeedCurve curve;
    std::vector<Transaction> transactions;
    double net_revenue = 0.0;         // dollars collected minus paid out (K)
    double aitt = 0.0;                // mean travel time, all travelers
    double car_aitt = 0.0;            // mean travel time, car travelers only
    double pt_share = 0.0;            // fraction choosing transit
    double welfare_per_capita = 0.0;  // mean realized systematic utility, dollars
    int car_count = 0;
    bool overrun = false;
};

}  // namespace tcs
