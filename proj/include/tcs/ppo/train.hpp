#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "tcs/common/rng.hpp"
#include "tcs/mdp/vec_env.hpp"
#include "tcs/ppo/buffer.hpp"
#include "tcs/ppo/gaussian.hpp"
#include "tcs/ppo/net.hpp"
#include "tcs/ppo/update.hpp"

namespace tcs::ppo {

// One learning-curve sample per iteration.
struct TrainRow {
    int iteration = 0;
    double mean_return = std::numeric_limits<double>::quiet_NaN();
    double aitt_last6 = std::numeric_limits<double>::quiet_NaN();
    double toll_m_mean = std::numeric_limits<double>::quiet_NaN();
    double kl = 0.0;
    double entropy = 0.0;
    double temporal = 0.0;
    double spatial = 0.0;
};

struct TrainResult {
    Mlp net;
    std::vector<TrainRow> curves;
};

inline std::uint64_t episode_seed(std::uint64_t seed, int env, long episode) {
    return mix_seed(mix_seed(seed, 0x657000ULL + static_cast<std::uint64_t>(env)),
                    static_cast<std::uint64_t>(episode));
}

// Alternates rollouts across parallel environments with regularized policy
// updates. The factory builds environment i; episodes are reseeded from
// per-environment deterministic streams, so a fixed seed reproduces the whole
// learning curve regardless of the worker thread count.
template <typename EnvFactory>
inline TrainResult train(EnvFactory&& make_env, const TrainConfig& cfg, int iterations,
                         std::uint64_t seed, int threads = 1,
                         const std::function<void(const TrainRow&)>& on_iteration = {}) {
    cfg.validate();
    using Env = decltype(make_env(0));
    std::vector<Env> env_list;
    env_list.reserve(static_cast<std::size_t>(cfg.n_env));
    for (int e = 0; e < cfg.n_env; ++e) env_list.push_back(make_env(e));
    mdp::VecEnv<Env> vec(std::move(env_list), threads);

    const int sdim = vec.env(0).state_dim();
    const int adim = vec.env(0).action_dim();

    TrainResult result;
    result.net = Mlp(sdim, adim, cfg.hidden_dim);
    result.net.init(seed, cfg.init_log_std);
    Adam adam(result.net.param_count());
    Rng policy_rng(mix_seed(seed, 0x616374ULL));
    Rng update_rng(mix_seed(seed, 0x757064ULL));

    std::vector<long> episode_index(static_cast<std::size_t>(cfg.n_env), 0);
    std::vector<std::uint64_t> first_seeds;
    for (int e = 0; e < cfg.n_env; ++e) first_seeds.push_back(episode_seed(seed, e, 0));
    std::vector<std::vector<double>> states = vec.reset_all(first_seeds);

    std::vector<double> ep_return(static_cast<std::size_t>(cfg.n_env), 0.0);
    std::vector<std::vector<double>> ep_aitt(static_cast<std::size_t>(cfg.n_env));

    for (int iter = 1; iter <= iterations; ++iter) {
        RolloutBuffer buffer(cfg.n_steps, cfg.n_env, sdim, adim);
        std::vector<double> finished_returns;
        std::vector<double> finished_aitt6;
        double toll_sum = 0.0;
        long toll_count = 0;

        std::vector<std::vector<double>> actions(static_cast<std::size_t>(cfg.n_env));
        std::vector<double> log_probs(static_cast<std::size_t>(cfg.n_env));
        std::vector<double> values(static_cast<std::size_t>(cfg.n_env));

        for (int t = 0; t < cfg.n_steps; ++t) {
            for (int e = 0; e < cfg.n_env; ++e) {
                const MlpOut o = forward(result.net, states[static_cast<std::size_t>(e)]);
                GaussianSample s = sample_action(o.mean, result.net.log_std, policy_rng);
                actions[static_cast<std::size_t>(e)] = std::move(s.action);
                log_probs[static_cast<std::size_t>(e)] = s.log_prob;
                values[static_cast<std::size_t>(e)] = o.value;
            }
            auto results = vec.step(actions);
            for (int e = 0; e < cfg.n_env; ++e) {
                const auto& r = results[static_cast<std::size_t>(e)];
                buffer.record(t, e, states[static_cast<std::size_t>(e)], r.state,
                              actions[static_cast<std::size_t>(e)],
                              log_probs[static_cast<std::size_t>(e)],
                              r.reward / cfg.reward_scale,
                              values[static_cast<std::size_t>(e)], r.done);
                ep_return[static_cast<std::size_t>(e)] += r.reward;
                if (std::isfinite(r.outcome.aitt)) {
                    ep_aitt[static_cast<std::size_t>(e)].push_back(r.outcome.aitt);
                }
                toll_sum += r.outcome.toll.amplitude;
                ++toll_count;
                if (r.done) {
                    finished_returns.push_back(ep_return[static_cast<std::size_t>(e)]);
                    const auto& hist = ep_aitt[static_cast<std::size_t>(e)];
                    if (!hist.empty()) {
                        const std::size_t win = std::min<std::size_t>(6, hist.size());
                        double s6 = 0.0;
                        for (std::size_t k = hist.size() - win; k < hist.size(); ++k) {
                            s6 += hist[k];
                        }
                        finished_aitt6.push_back(s6 / static_cast<double>(win));
                    }
                    ep_return[static_cast<std::size_t>(e)] = 0.0;
                    ep_aitt[static_cast<std::size_t>(e)].clear();
                    const long k = ++episode_index[static_cast<std::size_t>(e)];
                    states[static_cast<std::size_t>(e)] =
                        vec.env(e).reset(episode_seed(seed, e, k));
                } else {
                    states[static_cast<std::size_t>(e)] = r.state;
                }
            }
        }

        std::vector<double> last_values(static_cast<std::size_t>(cfg.n_env));
        for (int e = 0; e < cfg.n_env; ++e) {
            last_values[static_cast<std::size_t>(e)] =
                forward(result.net, states[static_cast<std::size_t>(e)]).value;
        }
        buffer.finalize(last_values, cfg.discount, cfg.gae_lambda,
                        cfg.normalize_advantages);

        const UpdateStats stats = update(result.net, adam, buffer, cfg, update_rng);

        TrainRow row;
        row.iteration = iter;
        if (!finished_returns.empty()) {
            double s = 0.0;
            for (double r : finished_returns) s += r;
            row.mean_return = s / static_cast<double>(finished_returns.size());
        }
        if (!finished_aitt6.empty()) {
            double s = 0.0;
            for (double a : finished_aitt6) s += a;
            row.aitt_last6 = s / static_cast<double>(finished_aitt6.size());
        }
        if (toll_count > 0) row.toll_m_mean = toll_sum / static_cast<double>(toll_count);
        row.kl = stats.kl;
        row.entropy = stats.entropy;
        row.temporal = stats.temporal;
        row.spatial = stats.spatial;
        result.curves.push_back(row);
        if (on_iteration) on_iteration(row);
    }
    return result;
}

}  // namespace tcs::ppo
