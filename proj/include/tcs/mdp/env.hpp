#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcs/common/rng.hpp"
#include "tcs/sim/system.hpp"

namespace tcs::mdp {

// Episode setup: horizon in days, whether the action adjusts only the tariff
// amplitude (1D, with center/width pinned) or all three parameters (3D), the
// transit-share target in the reward, and the day-0 tariff.
struct EpisodeConfig {
    int horizon = 60;
    int action_dim = 1;                 // 1 or 3
    double fixed_center = 420.0;        // used in 1D mode
    double fixed_width = 60.0;          // used in 1D mode
    double pt_target = 0.1;             // transit mode share the reward pulls toward
    TollProfile initial_toll{0.0, 420.0, 60.0};
    double price_norm = 5.0;            // price scaling for the state encoding
    double discount = 1.0;

    void validate() const {
        if (horizon < 1) throw std::invalid_argument("episode horizon must be >= 1");
        if (action_dim != 1 && action_dim != 3) {
            throw std::invalid_argument("action dimension must be 1 or 3");
        }
        if (pt_target < 0.0 || pt_target > 1.0) {
            throw std::invalid_argument("transit share target must lie in [0,1]");
        }
        initial_toll.validate();
    }
};

inline int state_dim(const EpisodeConfig& ep) {
    return kFlowBins + 1 + (ep.action_dim == 1 ? 1 : 3);
}

// Feature encoding of the observable day state: departure flows scaled by the
// population, the token price scaled by price_norm, and the tariff parameters
// scaled to [0,1] by their bounds.
inline std::vector<double> encode_state(const std::vector<double>& flows, double price,
                                        const TollProfile& toll, int population,
                                        const EpisodeConfig& ep) {
    if (static_cast<int>(flows.size()) != kFlowBins) {
        throw std::invalid_argument("expected " + std::to_string(kFlowBins) +
                                    " flow bins, got " + std::to_string(flows.size()));
    }
    std::vector<double> s;
    s.reserve(static_cast<std::size_t>(state_dim(ep)));
    for (double f : flows) s.push_back(f / static_cast<double>(population));
    s.push_back(price / ep.price_norm);
    s.push_back((toll.amplitude - TollBounds::min_amplitude) /
                (TollBounds::max_amplitude - TollBounds::min_amplitude));
    if (ep.action_dim == 3) {
        s.push_back((toll.center - TollBounds::min_center) /
                    (TollBounds::max_center - TollBounds::min_center));
        s.push_back((toll.width - TollBounds::min_width) /
                    (TollBounds::max_width - TollBounds::min_width));
    }
    return s;
}

// Tariff parameters recovered from an encoded state (the tail slots).
inline TollProfile decode_toll(const std::vector<double>& state, const EpisodeConfig& ep) {
    const std::size_t base = static_cast<std::size_t>(kFlowBins) + 1;
    TollProfile t;
    t.amplitude = TollBounds::min_amplitude +
                  state[base] * (TollBounds::max_amplitude - TollBounds::min_amplitude);
    if (ep.action_dim == 3) {
        t.center = TollBounds::min_center +
                   state[base + 1] * (TollBounds::max_center - TollBounds::min_center);
        t.width = TollBounds::min_width +
                  state[base + 2] * (TollBounds::max_width - TollBounds::min_width);
    } else {
        t.center = ep.fixed_center;
        t.width = ep.fixed_width;
    }
    return t;
}

// Reward for one simulated day: travel time normalized by the free-flow time,
// plus a penalty for missing the transit-share target.
inline double day_reward(double aitt, double pt_share, double free_flow_tt,
                         double pt_target) {
    return -aitt / free_flow_tt - std::abs(pt_share - pt_target);
}

struct StepResult {
    std::vector<double> state;
    double reward = 0.0;
    bool done = false;
    DayOutcome outcome;  // the day the action produced
};

// The commute system exposed as a finite-horizon decision process. reset()
// simulates day 0 under the initial tariff to produce the first observation;
// each step applies the action as a bounded adjustment to the tariff
// parameters, simulates the next day, and rewards that day's outcome.
class TollEnv {
public:
    TollEnv(ScenarioConfig scenario, EpisodeConfig episode)
        : scenario_(std::move(scenario)), episode_(episode), system_(scenario_) {
        episode_.validate();
        if (episode_.action_dim == 1) {
            episode_.initial_toll.center = episode_.fixed_center;
            episode_.initial_toll.width = episode_.fixed_width;
            episode_.initial_toll.validate();
        }
    }

    int state_dim() const { return mdp::state_dim(episode_); }
    int action_dim() const { return episode_.action_dim; }
    const ScenarioConfig& scenario() const { return scenario_; }
    const EpisodeConfig& episode() const { return episode_; }

    std::vector<double> reset(std::uint64_t seed) {
        system_.reset();
        rng_ = Rng(mix_seed(seed, 0x646179ULL));
        toll_ = episode_.initial_toll;
        steps_ = 0;
        done_ = false;
        last_outcome_ = system_.run_day(toll_, rng_);
        return observe();
    }

    StepResult step(const std::vector<double>& action) {
        if (done_) throw std::logic_error("step() called on a finished episode");
        if (static_cast<int>(action.size()) != episode_.action_dim) {
            throw std::invalid_argument("action dimension mismatch: expected " +
                                        std::to_string(episode_.action_dim) + ", got " +
                                        std::to_string(action.size()));
        }
        toll_.amplitude = std::clamp(toll_.amplitude + action[0],
                                     TollBounds::min_amplitude, TollBounds::max_amplitude);
        if (episode_.action_dim == 3) {
            toll_.center = std::clamp(toll_.center + action[1], TollBounds::min_center,
                                      TollBounds::max_center);
            toll_.width = std::clamp(toll_.width + action[2], TollBounds::min_width,
                                     TollBounds::max_width);
        }

        StepResult r;
        r.outcome = system_.run_day(toll_, rng_);
        last_outcome_ = r.outcome;
        ++steps_;
        done_ = steps_ >= episode_.horizon;
        r.reward = day_reward(r.outcome.aitt, r.outcome.pt_share,
                              scenario_.free_flow_travel_time(), episode_.pt_target);
        r.done = done_;
        r.state = observe();
        return r;
    }

    bool done() const { return done_; }
    const TollProfile& toll() const { return toll_; }
    const DayOutcome& last_outcome() const { return last_outcome_; }
    double price() const { return system_.market().price; }

private:
    std::vector<double> observe() const {
        return encode_state(last_outcome_.departure_flows, system_.market().price, toll_,
                            scenario_.population, episode_);
    }

    ScenarioConfig scenario_;
    EpisodeConfig episode_;
    System system_;
    Rng rng_;
    TollProfile toll_;
    DayOutcome last_outcome_;
    int steps_ = 0;
    bool done_ = true;  // must reset first
};

}  // namespace tcs::mdp
