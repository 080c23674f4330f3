#pragma once

#include <cmath>
#include <vector>

#include "tcs/common/rng.hpp"

namespace tcs::ppo {

inline constexpr double kLogTwoPi = 1.8378770664093454836;  // ln(2*pi)

struct GaussianSample {
    std::vector<double> action;
    double log_prob = 0.0;
};

// Diagonal-Gaussian policy head: action = mean + exp(log_std) * z.
inline GaussianSample sample_action(const std::vector<double>& mean,
                                    const std::vector<double>& log_std, Rng& rng) {
    GaussianSample s;
    s.action.resize(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) {
        const double sigma = std::exp(log_std[i]);
        const double z = rng.normal();
        s.action[i] = mean[i] + sigma * z;
        s.log_prob += -0.5 * z * z - log_std[i] - 0.5 * kLogTwoPi;
    }
    return s;
}

inline double log_prob(const std::vector<double>& mean, const std::vector<double>& log_std,
                       const std::vector<double>& action) {
    double lp = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        const double z = (action[i] - mean[i]) / std::exp(log_std[i]);
        lp += -0.5 * z * z - log_std[i] - 0.5 * kLogTwoPi;
    }
    return lp;
}

// d log_prob / d mean_i and d log_prob / d log_std_i at the given action.
inline void log_prob_grads(const std::vector<double>& mean,
                           const std::vector<double>& log_std,
                           const std::vector<double>& action,
                           std::vector<double>& d_mean, std::vector<double>& d_log_std) {
    d_mean.assign(mean.size(), 0.0);
    d_log_std.assign(mean.size(), 0.0);
    for (std::size_t i = 0; i < mean.size(); ++i) {
        const double sigma = std::exp(log_std[i]);
        const double z = (action[i] - mean[i]) / sigma;
        d_mean[i] = z / sigma;
        d_log_std[i] = z * z - 1.0;
    }
}

// Entropy of the diagonal Gaussian: sum_i (log_std_i + 0.5*ln(2*pi*e)).
// Independent of the state, and monotone in each log_std.
inline double entropy(const std::vector<double>& log_std) {
    double s = 0.0;
    for (double ls : log_std) s += ls + 0.5 * (kLogTwoPi + 1.0);
    return s;
}

}  // namespace tcs::ppo
