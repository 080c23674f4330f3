#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace tcs {

// One simulated day covers the 720-minute commute period; departures are
// aggregated into 5-minute bins for observation.
inline constexpr int kDayMinutes = 720;
inline constexpr int kFlowBinMinutes = 5;
inline constexpr int kFlowBins = kDayMinutes / kFlowBinMinutes;
inline constexpr int kTollLevels = 8;  // amplitude discretized in unit steps 0..7

// Full description of one commute scenario: population size, network supply,
// transit alternative, token market, and the heterogeneity distributions the
// traveler population is sampled from.
struct ScenarioConfig {
    // demand / supply
    int population = 7500;
    double jam_accumulation = 7000.0;   // vehicles at which network speed hits zero
    double free_flow_speed_car = 45.0;  // mph
    double free_flow_speed_pt = 18.0;   // mph, informational
    double trip_length = 18.0;          // miles, identical for every traveler by default
    double trip_length_sdlog = 0.0;     // lognormal jitter around trip_length (0 = fixed)

    // transit alternative
    double pt_travel_time = 60.0;  // minutes
    double pt_wait_time = 5.0;     // minutes
    double pt_fare = 2.0;          // dollars

    // car operating cost and income effects
    double fuel_cost = 3.13;        // dollars per trip
    double income_effect_coef = 3.0;    // weight on the log income adjustment
    double income_effect_offset = 2.0;  // offset inside the log income adjustment

    // time discretization
    int sim_step_min = 1;        // traffic integration step
    int departure_step_min = 1;  // spacing of departure windows
    double arrival_flex = 0.0;   // minutes of on-time slack around desired arrival
    int window_half_count = 60;  // windows on each side of the desired departure

    // token market
    double revenue_threshold = 200.0;  // dollars of daily net revenue tolerated before a price move
    double price_step = 0.05;          // dollars per day price adjustment
    double token_lifetime = 720.0;     // minutes until an allocated token expires
    double allocation_rate = 0.00269;  // tokens per minute
    double initial_price = 1.0;        // dollars per token on day 0
    bool market_enabled = true;        // false: no tolls traded, price pinned to 0

    // traveler heterogeneity
    double income_median = 100.0;  // dollars per day
    double income_sdlog = 0.4;
    double income_floor = 50.0;    // lower truncation of sampled incomes
    double vot_ratio = 0.25;       // value of travel time as a share of the wage
    double beta_early_ratio = 0.61;
    double beta_late_ratio = 2.4;
    double beta_wait_ratio = 1.5;
    double logit_scale = 1.0;
    double arrival_center = 480.0;  // desired arrival distribution, minute-of-day
    double arrival_sd = 30.0;
    double arrival_min = 360.0;
    double arrival_max = 600.0;

    // day-to-day perception learning
    double perception_weight = 0.5;  // blend toward the most recent travel times

    // literal variants of the cost / utility sign conventions (see README)
    bool literal_travel_time_sign = false;  // +2*alpha*tt instead of -2*alpha*tt
    bool literal_sell_cost = false;         // surplus cost (L*r - T)*p instead of (T - x)*p

    uint64_t population_seed = 1;  // heterogeneity draw, independent of run seeds

    double free_flow_travel_time() const {
        return trip_length / free_flow_speed_car * 60.0;
    }

    double full_wallet() const { return allocation_rate * token_lifetime; }

    void validate() const {
        auto require = [](bool ok, const char* msg) {
            if (!ok) throw std::invalid_argument(std::string("scenario config: ") + msg);
        };
        require(population > 0, "population must be positive");
        require(jam_accumulation > 0, "jam accumulation must be positive");
        require(free_flow_speed_car > 0, "car free-flow speed must be positive");
        require(trip_length > 0, "trip length must be positive");
        require(pt_travel_time > 0 && pt_wait_time >= 0, "transit times invalid");
        require(sim_step_min == 1, "traffic integration step must be 1 minute");
        require(departure_step_min >= 1, "departure step must be at least 1 minute");
        require(window_half_count >= 0, "window half count must be nonnegative");
        require(revenue_threshold > 0, "revenue threshold must be positive");
        require(price_step > 0, "price step must be positive");
        require(token_lifetime > 0 && allocation_rate >= 0, "token allocation invalid");
        require(initial_price >= 0, "initial price must be nonnegative");
        require(income_median > 0 && income_floor > 0, "incomes must be positive");
        require(income_floor > 2.0 * (pt_fare + 0.1), "income floor too low for transit budget");
        require(vot_ratio > 0, "value-of-time ratio must be positive");
        require(beta_early_ratio <= 1.0 && beta_late_ratio >= 1.0,
                "schedule delay ratios must bracket the travel time weight");
        require(logit_scale > 0, "logit scale must be positive");
        require(arrival_min < arrival_max, "arrival truncation range empty");
        require(perception_weight >= 0.0 && perception_weight <= 1.0,
                "perception weight must lie in [0,1]");
    }
};

// Baseline full-size scenario.
inline ScenarioConfig paper_scale_scenario() { return ScenarioConfig{}; }

// 10x downscaled scenario preserving the demand/capacity ratio; the default
// for experiments and the acceptance suite.
inline ScenarioConfig desk_scale_scenario() {
    ScenarioConfig c;
    c.population = 750;
    c.jam_accumulation = 700.0;
    return c;
}

inline void to_json(nlohmann::json& j, const ScenarioConfig& c) {
    j = nlohmann::json{
        {"population", c.population},
        {"jam_accumulation", c.jam_accumulation},
        {"free_flow_speed_car", c.free_flow_speed_car},
        {"free_flow_speed_pt", c.free_flow_speed_pt},
        {"trip_length", c.trip_length},
        {"trip_length_sdlog", c.trip_length_sdlog},
        {"pt_travel_time", c.pt_travel_time},
        {"pt_wait_time", c.pt_wait_time},
        {"pt_fare", c.pt_fare},
        {"fuel_cost", c.fuel_cost},
        {"income_effect_coef", c.income_effect_coef},
        {"income_effect_offset", c.income_effect_offset},
        {"sim_step_min", c.sim_step_min},
        {"departure_step_min", c.departure_step_min},
        {"arrival_flex", c.arrival_flex},
        {"window_half_count", c.window_half_count},
        {"revenue_threshold", c.revenue_threshold},
        {"price_step", c.price_step},
        {"token_lifetime", c.token_lifetime},
        {"allocation_rate", c.allocation_rate},
        {"initial_price", c.initial_price},
        {"market_enabled", c.market_enabled},
        {"income_median", c.income_median},
        {"income_sdlog", c.income_sdlog},
        {"income_floor", c.income_floor},
        {"vot_ratio", c.vot_ratio},
        {"beta_early_ratio", c.beta_early_ratio},
        {"beta_late_ratio", c.beta_late_ratio},
        {"beta_wait_ratio", c.beta_wait_ratio},
        {"logit_scale", c.logit_scale},
        {"arrival_center", c.arrival_center},
        {"arrival_sd", c.arrival_sd},
        {"arrival_min", c.arrival_min},
        {"arrival_max", c.arrival_max},
        {"perception_weight", c.perception_weight},
        {"literal_travel_time_sign", c.literal_travel_time_sign},
        {"literal_sell_cost", c.literal_sell_cost},
        {"population_seed", c.population_seed}};
}

inline void from_json(const nlohmann::json& j, ScenarioConfig& c) {
    const ScenarioConfig d = c;  // field-wise defaults for missing keys
    c.population = j.value("population", d.population);
    c.jam_accumulation = j.value("jam_accumulation", d.jam_accumulation);
    c.free_flow_speed_car = j.value("free_flow_speed_car", d.free_flow_speed_car);
    c.free_flow_speed_pt = j.value("free_flow_speed_pt", d.free_flow_speed_pt);
    c.trip_length = j.value("trip_length", d.trip_length);
    c.trip_length_sdlog = j.value("trip_length_sdlog", d.trip_length_sdlog);
    c.pt_travel_time = j.value("pt_travel_time", d.pt_travel_time);
    c.pt_wait_time = j.value("pt_wait_time", d.pt_wait_time);
    c.pt_fare = j.value("pt_fare", d.pt_fare);
    c.fuel_cost = j.value("fuel_cost", d.fuel_cost);
    c.income_effect_coef = j.value("income_effect_coef", d.income_effect_coef);
    c.income_effect_offset = j.value("income_effect_offset", d.income_effect_offset);
    c.sim_step_min = j.value("sim_step_min", d.sim_step_min);
    c.departure_step_min = j.value("departure_step_min", d.departure_step_min);
    c.arrival_flex = j.value("arrival_flex", d.arrival_flex);
    c.window_half_count = j.value("window_half_count", d.window_half_count);
    c.revenue_threshold = j.value("revenue_threshold", d.revenue_threshold);
    c.price_step = j.value("price_step", d.price_step);
    c.token_lifetime = j.value("token_lifetime", d.token_lifetime);
    c.allocation_rate = j.value("allocation_rate", d.allocation_rate);
    c.initial_price = j.value("initial_price", d.initial_price);
    c.market_enabled = j.value("market_enabled", d.market_enabled);
    c.income_median = j.value("income_median", d.income_median);
    c.income_sdlog = j.value("income_sdlog", d.income_sdlog);
    c.income_floor = j.value("income_floor", d.income_floor);
    c.vot_ratio = j.value("vot_ratio", d.vot_ratio);
    c.beta_early_ratio = j.value("beta_early_ratio", d.beta_early_ratio);
    c.beta_late_ratio = j.value("beta_late_ratio", d.beta_late_ratio);
    c.beta_wait_ratio = j.value("beta_wait_ratio", d.beta_wait_ratio);
    c.logit_scale = j.value("logit_scale", d.logit_scale);
    c.arrival_center = j.value("arrival_center", d.arrival_center);
    c.arrival_sd = j.value("arrival_sd", d.arrival_sd);
    c.arrival_min = j.value("arrival_min", d.arrival_min);
    c.arrival_max = j.value("arrival_max", d.arrival_max);
    c.perception_weight = j.value("perception_weight", d.perception_weight);
    c.literal_travel_time_sign = j.value("literal_travel_time_sign", d.literal_travel_time_sign);
    c.literal_sell_cost = j.value("literal_sell_cost", d.literal_sell_cost);
    c.population_seed = j.value("population_seed", d.population_seed);
}

}  // namespace tcs
