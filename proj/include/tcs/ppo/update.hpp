#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcs/common/rng.hpp"
#include "tcs/ppo/buffer.hpp"
#include "tcs/ppo/gaussian.hpp"
#include "tcs/ppo/net.hpp"

namespace tcs::ppo {

// Action-smoothness regularization variants: penalize the distance between
// policy outputs at consecutive states (temporal) or between a state and a
// noisy copy of it (spatial), under the L1 or L2 norm.
enum class CapsMode { kNone, kTemporalL1, kTemporalL2, kSpatialL1, kSpatialL2 };

inline const char* caps_mode_name(CapsMode m) {
    switch (m) {
        case CapsMode::kNone: return "none";
        case CapsMode::kTemporalL1: return "t_l1";
        case CapsMode::kTemporalL2: return "t_l2";
        case CapsMode::kSpatialL1: return "s_l1";
        case CapsMode::kSpatialL2: return "s_l2";
    }
    return "none";
}

inline CapsMode caps_mode_from_name(const std::string& name) {
    if (name == "none") return CapsMode::kNone;
    if (name == "t_l1") return CapsMode::kTemporalL1;
    if (name == "t_l2") return CapsMode::kTemporalL2;
    if (name == "s_l1") return CapsMode::kSpatialL1;
    if (name == "s_l2") return CapsMode::kSpatialL2;
    throw std::invalid_argument("unknown smoothness mode: " + name);
}

struct TrainConfig {
    double learning_rate = 1e-3;
    double clip_range = 0.2;
    double discount = 1.0;
    double gae_lambda = 1.0;
    double entropy_coef = 0.2;
    double value_coef = 0.5;
    double kl_limit = 0.05;
    int batch_size = 600;
    int n_epoch = 10;
    int n_steps = 60;
    int n_env = 10;
    int hidden_dim = 8;
    double init_log_std = -1.0;
    CapsMode caps_mode = CapsMode::kNone;
    double caps_temporal_weight = 1e-4;
    double caps_spatial_weight = 1e-4;
    double spatial_noise = 0.05;  // state-space perturbation scale, normalized units
    bool normalize_advantages = true;
    double max_grad_norm = 0.5;
    // Rewards are divided by this inside the learner so undiscounted value
    // targets stay near the network's output scale; advantage normalization
    // makes the policy gradient invariant to it. Curves report raw returns.
    double reward_scale = 60.0;
    // Exploration noise kept inside a sane band: under an adaptive-moment
    // optimizer the entropy bonus drifts log_std at the full learning rate
    // whenever the surrogate's noise-scale signal is weak, and unbounded
    // growth saturates bounded action spaces.
    double log_std_min = -4.0;
    double log_std_max = 0.0;

    void validate() const {
        if (clip_range <= 0.0 || clip_range >= 1.0) {
            throw std::invalid_argument("clip range must lie in (0,1)");
        }
        if (learning_rate < 0.0 || entropy_coef < 0.0 || value_coef < 0.0 ||
            kl_limit < 0.0 || caps_temporal_weight < 0.0 || caps_spatial_weight < 0.0 ||
            spatial_noise < 0.0) {
            throw std::invalid_argument("train config coefficients must be nonnegative");
        }
        if (batch_size < 1 || n_epoch < 1 || n_steps < 1 || n_env < 1) {
            throw std::invalid_argument("train config sizes must be positive");
        }
        if (reward_scale <= 0.0) {
            throw std::invalid_argument("reward scale must be positive");
        }
        if (log_std_min >= log_std_max) {
            throw std::invalid_argument("log_std clamp range is empty");
        }
    }
};

// Defaults used for single-parameter tariff control. 40 episodes feed each
// update: a 2400-step rollout buffer cut into minibatches of 600 for 10
// epochs, i.e. 40 gradient steps per learning phase.
inline TrainConfig train_config_1d() {
    TrainConfig cfg;
    cfg.n_env = 40;
    return cfg;
}

// Defaults used for three-parameter tariff control.
inline TrainConfig train_config_3d() {
    TrainConfig cfg;
    cfg.batch_size = 960;
    cfg.n_epoch = 16;
    cfg.n_env = 32;
    return cfg;
}

struct SurrogateTerm {
    double value = 0.0;
    double d_log_prob_new = 0.0;  // zero in the clipped dead zone
};

// Clipped importance-ratio surrogate for one sample: min of the raw and the
// ratio-clipped objective. The gradient with respect to the new log
// probability vanishes once the ratio leaves the clip band in the direction
// the advantage would push it.
inline SurrogateTerm clipped_surrogate(double log_prob_new, double log_prob_old,
                                       double advantage, double clip_range) {
    const double ratio = std::exp(log_prob_new - log_prob_old);
    const double raw = ratio * advantage;
    const double clipped =
        std::clamp(ratio, 1.0 - clip_range, 1.0 + clip_range) * advantage;
    if (raw <= clipped) {
        return SurrogateTerm{raw, raw};  // d(raw)/d(logp_new) = ratio * advantage
    }
    return SurrogateTerm{clipped, 0.0};
}

// Distance between two policy outputs with the chosen norm; optionally
// accumulates d(distance)/d(m1) into g1 and the negative into g2 with the
// given weight. Zero distance has zero gradient.
inline double caps_distance(const std::vector<double>& m1, const std::vector<double>& m2,
                            bool l1, double weight, std::vector<double>* g1,
                            std::vector<double>* g2) {
    double dist = 0.0;
    if (l1) {
        for (std::size_t i = 0; i < m1.size(); ++i) dist += std::abs(m1[i] - m2[i]);
        if (g1 != nullptr) {
            for (std::size_t i = 0; i < m1.size(); ++i) {
                const double d = m1[i] - m2[i];
                const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
                (*g1)[i] += weight * s;
                (*g2)[i] -= weight * s;
            }
        }
        return dist;
    }
    for (std::size_t i = 0; i < m1.size(); ++i) {
        const double d = m1[i] - m2[i];
        dist += d * d;
    }
    dist = std::sqrt(dist);
    if (g1 != nullptr && dist > 0.0) {
        for (std::size_t i = 0; i < m1.size(); ++i) {
            const double d = (m1[i] - m2[i]) / dist;
            (*g1)[i] += weight * d;
            (*g2)[i] -= weight * d;
        }
    }
    return dist;
}

struct LossBreakdown {
    double total = 0.0;
    double surrogate = 0.0;   // mean clipped surrogate (maximized)
    double entropy = 0.0;     // policy entropy
    double value_loss = 0.0;  // mean squared value error
    double temporal = 0.0;    // mean action distance across consecutive states
    double spatial = 0.0;     // mean action distance under state noise
};

// Minibatch loss, minimized by the update:
//   -(surrogate + entropy bonus) + value_coef * value error
//   + temporal and spatial smoothness penalties per the mode.
// With the smoothness mode off, the objective reduces to the plain clipped
// surrogate with entropy bonus, term for term. Accumulates parameter
// gradients into `grad` when non-null. `spatial_noise` supplies one
// perturbation vector per sample so the evaluation is a deterministic
// function of (net, batch, noise) — finite differences check it directly.
inline LossBreakdown minibatch_loss(const Mlp& net, const RolloutBuffer& buf,
                                    const std::vector<std::size_t>& indices,
                                    const TrainConfig& cfg,
                                    const std::vector<std::vector<double>>& spatial_noise,
                                    Mlp* grad) {
    const double b = static_cast<double>(indices.size());
    const bool temporal = cfg.caps_mode == CapsMode::kTemporalL1 ||
                          cfg.caps_mode == CapsMode::kTemporalL2;
    const bool spatial = cfg.caps_mode == CapsMode::kSpatialL1 ||
                         cfg.caps_mode == CapsMode::kSpatialL2;
    const bool l1 = cfg.caps_mode == CapsMode::kTemporalL1 ||
                    cfg.caps_mode == CapsMode::kSpatialL1;

    LossBreakdown out;
    MlpCache cache, cache_other;
    std::vector<double> state(static_cast<std::size_t>(buf.state_dim()));
    std::vector<double> action(static_cast<std::size_t>(buf.action_dim()));
    std::vector<double> d_mean(static_cast<std::size_t>(buf.action_dim()));
    std::vector<double> d_mean_other(static_cast<std::size_t>(buf.action_dim()));
    std::vector<double> lp_dm, lp_dls;

    for (std::size_t row = 0; row < indices.size(); ++row) {
        const std::size_t i = indices[row];
        state.assign(buf.state(i), buf.state(i) + buf.state_dim());
        action.assign(buf.action(i), buf.action(i) + buf.action_dim());

        const MlpOut o = forward(net, state, cache);
        const double lp_new = log_prob(o.mean, net.log_std, action);
        const SurrogateTerm surr =
            clipped_surrogate(lp_new, buf.log_prob(i), buf.advantage(i), cfg.clip_range);
        out.surrogate += surr.value / b;

        const double v_err = o.value - buf.return_at(i);
        out.value_loss += v_err * v_err / b;

        std::fill(d_mean.begin(), d_mean.end(), 0.0);
        double d_value = 0.0;
        if (grad != nullptr) {
            // surrogate is maximized: loss gradient is its negative
            const double d_lp = -surr.d_log_prob_new / b;
            if (d_lp != 0.0) {
                log_prob_grads(o.mean, net.log_std, action, lp_dm, lp_dls);
                for (std::size_t a = 0; a < d_mean.size(); ++a) {
                    d_mean[a] += d_lp * lp_dm[a];
                    grad->log_std[a] += d_lp * lp_dls[a];
                }
            }
            d_value = cfg.value_coef * 2.0 * v_err / b;
        }

        if (temporal || spatial) {
            std::vector<double> other_state;
            if (temporal) {
                other_state.assign(buf.next_state(i), buf.next_state(i) + buf.state_dim());
            } else {
                other_state = state;
                const auto& noise = spatial_noise[row];
                for (std::size_t j = 0; j < other_state.size(); ++j) {
                    other_state[j] += noise[j];
                }
            }
            const MlpOut o2 = forward(net, other_state, cache_other);
            const double weight =
                (temporal ? cfg.caps_temporal_weight : cfg.caps_spatial_weight) / b;
            std::fill(d_mean_other.begin(), d_mean_other.end(), 0.0);
            const double dist =
                caps_distance(o.mean, o2.mean, l1, weight,
                              grad != nullptr ? &d_mean : nullptr,
                              grad != nullptr ? &d_mean_other : nullptr);
            (temporal ? out.temporal : out.spatial) += dist / b;
            if (grad != nullptr) {
                backward(net, cache_other, d_mean_other, 0.0, *grad);
            }
        }

        if (grad != nullptr) {
            backward(net, cache, d_mean, d_value, *grad);
        }
    }

    out.entropy = entropy(net.log_std);
    if (grad != nullptr) {
        for (std::size_t a = 0; a < net.log_std.size(); ++a) {
            grad->log_std[a] -= cfg.entropy_coef;  // d(entropy)/d(log_std) = 1
        }
    }

    out.total = -(out.surrogate + cfg.entropy_coef * out.entropy) +
                cfg.value_coef * out.value_loss + cfg.caps_temporal_weight * out.temporal +
                cfg.caps_spatial_weight * out.spatial;
    return out;
}

struct UpdateStats {
    double surrogate = 0.0;
    double entropy = 0.0;
    double value_loss = 0.0;
    double kl = 0.0;
    double temporal = 0.0;
    double spatial = 0.0;
    int minibatches_applied = 0;
    int epochs_run = 0;
    bool early_stopped = false;
};

// One learning phase: several epochs of shuffled minibatches ascending the
// regularized objective, with a hard stop the moment the estimated divergence
// from the rollout policy exceeds the limit — the tripping minibatch is not
// applied.
inline UpdateStats update(Mlp& net, Adam& adam, const RolloutBuffer& buf,
                          const TrainConfig& cfg, Rng& rng) {
    cfg.validate();
    if (!buf.finalized()) throw std::logic_error("finalize the rollout buffer first");

    const bool spatial = cfg.caps_mode == CapsMode::kSpatialL1 ||
                         cfg.caps_mode == CapsMode::kSpatialL2;
    std::vector<std::size_t> order(buf.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    UpdateStats stats;
    int kl_samples = 0;
    std::vector<double> state(static_cast<std::size_t>(buf.state_dim()));
    std::vector<double> action(static_cast<std::size_t>(buf.action_dim()));

    for (int epoch = 0; epoch < cfg.n_epoch && !stats.early_stopped; ++epoch) {
        rng.shuffle(order);
        stats.epochs_run = epoch + 1;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                                 order.begin() + static_cast<std::ptrdiff_t>(end));

            // divergence estimate under the current parameters, before applying
            double kl = 0.0;
            for (std::size_t i : batch) {
                state.assign(buf.state(i), buf.state(i) + buf.state_dim());
                action.assign(buf.action(i), buf.action(i) + buf.action_dim());
                const MlpOut o = forward(net, state);
                kl += buf.log_prob(i) - log_prob(o.mean, net.log_std, action);
            }
            kl /= static_cast<double>(batch.size());
            stats.kl += kl;
            ++kl_samples;
            if (kl > cfg.kl_limit) {
                stats.early_stopped = true;
                break;
            }

            std::vector<std::vector<double>> noise;
            if (spatial) {
                noise.resize(batch.size());
                for (auto& v : noise) {
                    v.resize(static_cast<std::size_t>(buf.state_dim()));
                    for (double& x : v) x = cfg.spatial_noise * rng.normal();
                }
            }

            Mlp grad = net.zeros_like();
            const LossBreakdown loss = minibatch_loss(net, buf, batch, cfg, noise, &grad);

            std::vector<double> flat_grad = grad.to_flat();
            for (double g : flat_grad) {
                if (!std::isfinite(g)) {
                    throw std::runtime_error("non-finite gradient in policy update");
                }
            }
            clip_grad_norm(flat_grad, cfg.max_grad_norm);
            std::vector<double> params = net.to_flat();
            adam.step(params, flat_grad, cfg.learning_rate);
            net.from_flat(params);
            for (double& ls : net.log_std) {
                ls = std::clamp(ls, cfg.log_std_min, cfg.log_std_max);
            }
            if (!net.all_finite()) {
                throw std::runtime_error("non-finite parameters after policy update");
            }

            stats.surrogate += loss.surrogate;
            stats.entropy += loss.entropy;
            stats.value_loss += loss.value_loss;
            stats.temporal += loss.temporal;
            stats.spatial += loss.spatial;
            ++stats.minibatches_applied;
        }
    }

    if (stats.minibatches_applied > 0) {
        const double n = static_cast<double>(stats.minibatches_applied);
        stats.surrogate /= n;
        stats.entropy /= n;
        stats.value_loss /= n;
        stats.temporal /= n;
        stats.spatial /= n;
    }
    if (kl_samples > 0) stats.kl /= static_cast<double>(kl_samples);
    return stats;
}

}  // namespace tcs::ppo
