#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tcs/ppo/gae.hpp"

namespace tcs::ppo {

// Experience collected over one rollout phase: n_steps lockstep steps across
// n_env environments, flattened step-major. Advantages are computed once the
// buffer is full and, by default, normalized to zero mean and unit variance
// over the whole update.
class RolloutBuffer {
public:
    RolloutBuffer(int n_steps, int n_env, int state_dim, int action_dim)
        : n_steps_(n_steps), n_env_(n_env), state_dim_(state_dim), action_dim_(action_dim) {
        const std::size_t n = size();
        states_.assign(n * static_cast<std::size_t>(state_dim), 0.0);
        next_states_.assign(n * static_cast<std::size_t>(state_dim), 0.0);
        actions_.assign(n * static_cast<std::size_t>(action_dim), 0.0);
        log_probs_.assign(n, 0.0);
        rewards_.assign(n, 0.0);
        values_.assign(n, 0.0);
        dones_.assign(n, 0);
        advantages_.assign(n, 0.0);
        returns_.assign(n, 0.0);
    }

    std::size_t size() const {
        return static_cast<std::size_t>(n_steps_) * static_cast<std::size_t>(n_env_);
    }
    int n_steps() const { return n_steps_; }
    int n_env() const { return n_env_; }
    int state_dim() const { return state_dim_; }
    int action_dim() const { return action_dim_; }

    void record(int t, int env, const std::vector<double>& state,
                const std::vector<double>& next_state, const std::vector<double>& action,
                double log_prob, double reward, double value, bool done) {
        const std::size_t i = flat(t, env);
        std::copy(state.begin(), state.end(),
                  states_.begin() + static_cast<std::ptrdiff_t>(i * state_dim_));
        std::copy(next_state.begin(), next_state.end(),
                  next_states_.begin() + static_cast<std::ptrdiff_t>(i * state_dim_));
        std::copy(action.begin(), action.end(),
                  actions_.begin() + static_cast<std::ptrdiff_t>(i * action_dim_));
        log_probs_[i] = log_prob;
        rewards_[i] = reward;
        values_[i] = value;
        dones_[i] = done ? 1 : 0;
    }

    // Computes advantages and returns (per environment, episode boundaries
    // respected; truncated tails bootstrapped with `last_values`), then
    // optionally normalizes advantages across the whole buffer.
    void finalize(const std::vector<double>& last_values, double gamma, double lambda,
                  bool normalize_advantages) {
        if (static_cast<int>(last_values.size()) != n_env_) {
            throw std::invalid_argument("one bootstrap value per environment required");
        }
        std::vector<double> rew(static_cast<std::size_t>(n_steps_));
        std::vector<double> val(static_cast<std::size_t>(n_steps_));
        std::vector<std::uint8_t> don(static_cast<std::size_t>(n_steps_));
        for (int e = 0; e < n_env_; ++e) {
            for (int t = 0; t < n_steps_; ++t) {
                const std::size_t i = flat(t, e);
                rew[static_cast<std::size_t>(t)] = rewards_[i];
                val[static_cast<std::size_t>(t)] = values_[i];
                don[static_cast<std::size_t>(t)] = dones_[i];
            }
            const GaeResult g = compute_gae(rew, val, don,
                                            last_values[static_cast<std::size_t>(e)],
                                            gamma, lambda);
            for (int t = 0; t < n_steps_; ++t) {
                const std::size_t i = flat(t, e);
                advantages_[i] = g.advantages[static_cast<std::size_t>(t)];
                returns_[i] = g.returns[static_cast<std::size_t>(t)];
            }
        }
        if (normalize_advantages && size() > 1) {
            double mean = 0.0;
            for (double a : advantages_) mean += a;
            mean /= static_cast<double>(advantages_.size());
            double var = 0.0;
            for (double a : advantages_) var += (a - mean) * (a - mean);
            var /= static_cast<double>(advantages_.size());
            const double sd = std::sqrt(var) + 1e-8;
            for (double& a : advantages_) a = (a - mean) / sd;
        }
        finalized_ = true;
    }

    bool finalized() const { return finalized_; }

    const double* state(std::size_t i) const { return states_.data() + i * state_dim_; }
    const double* next_state(std::size_t i) const {
        return next_states_.data() + i * state_dim_;
    }
    const double* action(std::size_t i) const { return actions_.data() + i * action_dim_; }
    double log_prob(std::size_t i) const { return log_probs_[i]; }
    double reward(std::size_t i) const { return rewards_[i]; }
    double value(std::size_t i) const { return values_[i]; }
    bool done(std::size_t i) const { return dones_[i] != 0; }
    double advantage(std::size_t i) const { return advantages_[i]; }
    double return_at(std::size_t i) const { return returns_[i]; }

private:
    std::size_t flat(int t, int env) const {
        return static_cast<std::size_t>(t) * static_cast<std::size_t>(n_env_) +
               static_cast<std::size_t>(env);
    }

    int n_steps_, n_env_, state_dim_, action_dim_;
    std::vector<double> states_, next_states_, actions_;
    std::vector<double> log_probs_, rewards_, values_;
    std::vector<std::uint8_t> dones_;
    std::vector<double> advantages_, returns_;
    bool finalized_ = false;
};

}  // namespace tcs::ppo
