#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tcs::ppo {

struct GaeResult {
    std::vector<double> advantages;
    std::vector<double> returns;
};

// Generalized advantage estimation over one environment's step sequence.
// `dones[t]` marks the end of an episode at step t; `last_value` bootstraps a
// rollout truncated mid-episode. With gamma = lambda = 1 the advantage equals
// the undiscounted return-to-go minus the value baseline, exactly.
inline GaeResult compute_gae(const std::vector<double>& rewards,
                             const std::vector<double>& values,
                             const std::vector<std::uint8_t>& dones, double last_value,
                             double gamma, double lambda) {
    if (rewards.size() != values.size() || rewards.size() != dones.size()) {
        throw std::invalid_argument("gae: rewards, values, dones must align");
    }
    const std::size_t n = rewards.size();
    GaeResult r;
    r.advantages.assign(n, 0.0);
    r.returns.assign(n, 0.0);
    double tail = 0.0;
    for (std::size_t t = n; t-- > 0;) {
        const double cont = dones[t] ? 0.0 : 1.0;
        const double next_value = (t + 1 < n) ? values[t + 1] : last_value;
        const double delta = rewards[t] + gamma * next_value * cont - values[t];
        tail = delta + gamma * lambda * cont * tail;
        r.advantages[t] = tail;
        r.returns[t] = tail + values[t];
    }
    return r;
}

}  // namespace tcs::ppo
