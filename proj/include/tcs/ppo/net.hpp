#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tcs/common/rng.hpp"

namespace tcs::ppo {

// Shared-trunk actor-critic: two tanh layers feed a linear policy-mean head
// and a linear value head; the action log standard deviations are free
// parameters. All math is explicit so gradients can be checked against
// finite differences.
struct Mlp {
    int input_dim = 0;
    int hidden_dim = 8;
    int action_dim = 1;

    std::vector<double> w1, b1;       // hidden x input, hidden
    std::vector<double> w2, b2;       // hidden x hidden, hidden
    std::vector<double> wa, ba;       // action x hidden, action
    std::vector<double> wv;           // hidden
    double bv = 0.0;
    std::vector<double> log_std;      // action

    Mlp() = default;
    Mlp(int input, int action, int hidden = 8)
        : input_dim(input), hidden_dim(hidden), action_dim(action) {
        w1.assign(static_cast<std::size_t>(hidden) * input, 0.0);
        b1.assign(static_cast<std::size_t>(hidden), 0.0);
        w2.assign(static_cast<std::size_t>(hidden) * hidden, 0.0);
        b2.assign(static_cast<std::size_t>(hidden), 0.0);
        wa.assign(static_cast<std::size_t>(action) * hidden, 0.0);
        ba.assign(static_cast<std::size_t>(action), 0.0);
        wv.assign(static_cast<std::size_t>(hidden), 0.0);
        log_std.assign(static_cast<std::size_t>(action), 0.0);
    }

    // Xavier-uniform trunk, small policy head so initial actions stay near
    // zero, and the configured initial exploration noise.
    void init(std::uint64_t seed, double init_log_std = -1.0) {
        Rng rng(mix_seed(seed, 0x6e6574ULL));
        auto xavier = [&rng](std::vector<double>& w, int fan_in, int fan_out, double gain) {
            const double limit = gain * std::sqrt(6.0 / (fan_in + fan_out));
            for (double& x : w) x = rng.uniform(-limit, limit);
        };
        xavier(w1, input_dim, hidden_dim, 1.0);
        xavier(w2, hidden_dim, hidden_dim, 1.0);
        xavier(wa, hidden_dim, action_dim, 0.01);
        xavier(wv, hidden_dim, 1, 1.0);
        std::fill(b1.begin(), b1.end(), 0.0);
        std::fill(b2.begin(), b2.end(), 0.0);
        std::fill(ba.begin(), ba.end(), 0.0);
        bv = 0.0;
        std::fill(log_std.begin(), log_std.end(), init_log_std);
    }

    Mlp zeros_like() const {
        Mlp g(input_dim, action_dim, hidden_dim);
        return g;
    }

    std::size_t param_count() const {
        return w1.size() + b1.size() + w2.size() + b2.size() + wa.size() + ba.size() +
               wv.size() + 1 + log_std.size();
    }

    // Visits every tensor in a fixed order (used by the optimizer state,
    // finite differencing, and checkpoints).
    template <typename Fn>
    void for_each_tensor(Fn&& fn) {
        fn("w1", std::vector<int>{hidden_dim, input_dim}, w1);
        fn("b1", std::vector<int>{hidden_dim}, b1);
        fn("w2", std::vector<int>{hidden_dim, hidden_dim}, w2);
        fn("b2", std::vector<int>{hidden_dim}, b2);
        fn("wa", std::vector<int>{action_dim, hidden_dim}, wa);
        fn("ba", std::vector<int>{action_dim}, ba);
        fn("wv", std::vector<int>{hidden_dim}, wv);
        fn("log_std", std::vector<int>{action_dim}, log_std);
    }

    std::vector<double> to_flat() const {
        std::vector<double> flat;
        flat.reserve(param_count());
        auto append = [&flat](const std::vector<double>& v) {
            flat.insert(flat.end(), v.begin(), v.end());
        };
        append(w1);
        append(b1);
        append(w2);
        append(b2);
        append(wa);
        append(ba);
        append(wv);
        flat.push_back(bv);
        append(log_std);
        return flat;
    }

    void from_flat(const std::vector<double>& flat) {
        if (flat.size() != param_count()) {
            throw std::invalid_argument("flat parameter size mismatch");
        }
        std::size_t o = 0;
        auto take = [&flat, &o](std::vector<double>& v) {
            std::copy(flat.begin() + static_cast<std::ptrdiff_t>(o),
                      flat.begin() + static_cast<std::ptrdiff_t>(o + v.size()), v.begin());
            o += v.size();
        };
        take(w1);
        take(b1);
        take(w2);
        take(b2);
        take(wa);
        take(ba);
        take(wv);
        bv = flat[o++];
        take(log_std);
    }

    bool all_finite() const {
        bool ok = std::isfinite(bv);
        auto scan = [&ok](const std::vector<double>& v) {
            for (double x : v) ok = ok && std::isfinite(x);
        };
        scan(w1);
        scan(b1);
        scan(w2);
        scan(b2);
        scan(wa);
        scan(ba);
        scan(wv);
        scan(log_std);
        return ok;
    }
};

struct MlpCache {
    std::vector<double> x;   // input
    std::vector<double> h1;  // tanh of layer 1
    std::vector<double> h2;  // tanh of layer 2
};

struct MlpOut {
    std::vector<double> mean;
    double value = 0.0;
};

inline MlpOut forward(const Mlp& net, const std::vector<double>& state, MlpCache& cache) {
    if (static_cast<int>(state.size()) != net.input_dim) {
        throw std::invalid_argument("state dimension " + std::to_string(state.size()) +
                                    " does not match network input " +
                                    std::to_string(net.input_dim));
    }
    const int h = net.hidden_dim;
    cache.x = state;
    cache.h1.assign(static_cast<std::size_t>(h), 0.0);
    for (int i = 0; i < h; ++i) {
        double z = net.b1[static_cast<std::size_t>(i)];
        const double* row = net.w1.data() + static_cast<std::size_t>(i) * net.input_dim;
        for (int j = 0; j < net.input_dim; ++j) z += row[j] * state[static_cast<std::size_t>(j)];
        cache.h1[static_cast<std::size_t>(i)] = std::tanh(z);
    }
    cache.h2.assign(static_cast<std::size_t>(h), 0.0);
    for (int i = 0; i < h; ++i) {
        double z = net.b2[static_cast<std::size_t>(i)];
        const double* row = net.w2.data() + static_cast<std::size_t>(i) * h;
        for (int j = 0; j < h; ++j) z += row[j] * cache.h1[static_cast<std::size_t>(j)];
        cache.h2[static_cast<std::size_t>(i)] = std::tanh(z);
    }
    MlpOut out;
    out.mean.assign(static_cast<std::size_t>(net.action_dim), 0.0);
    for (int a = 0; a < net.action_dim; ++a) {
        double z = net.ba[static_cast<std::size_t>(a)];
        const double* row = net.wa.data() + static_cast<std::size_t>(a) * h;
        for (int j = 0; j < h; ++j) z += row[j] * cache.h2[static_cast<std::size_t>(j)];
        out.mean[static_cast<std::size_t>(a)] = z;
    }
    out.value = net.bv;
    for (int j = 0; j < h; ++j) out.value += net.wv[static_cast<std::size_t>(j)] * cache.h2[static_cast<std::size_t>(j)];
    return out;
}

inline MlpOut forward(const Mlp& net, const std::vector<double>& state) {
    MlpCache cache;
    return forward(net, state, cache);
}

// Accumulates parameter gradients for one sample given the loss gradients at
// the policy-mean and value outputs.
inline void backward(const Mlp& net, const MlpCache& cache,
                     const std::vector<double>& d_mean, double d_value, Mlp& grad) {
    const int h = net.hidden_dim;

    std::vector<double> dh2(static_cast<std::size_t>(h), 0.0);
    for (int a = 0; a < net.action_dim; ++a) {
        const double g = d_mean[static_cast<std::size_t>(a)];
        if (g == 0.0) continue;
        const double* row = net.wa.data() + static_cast<std::size_t>(a) * h;
        double* grow = grad.wa.data() + static_cast<std::size_t>(a) * h;
        for (int j = 0; j < h; ++j) {
            dh2[static_cast<std::size_t>(j)] += row[j] * g;
            grow[j] += g * cache.h2[static_cast<std::size_t>(j)];
        }
        grad.ba[static_cast<std::size_t>(a)] += g;
    }
    if (d_value != 0.0) {
        for (int j = 0; j < h; ++j) {
            dh2[static_cast<std::size_t>(j)] += net.wv[static_cast<std::size_t>(j)] * d_value;
            grad.wv[static_cast<std::size_t>(j)] += d_value * cache.h2[static_cast<std::size_t>(j)];
        }
        grad.bv += d_value;
    }

    std::vector<double> dz2(static_cast<std::size_t>(h));
    for (int i = 0; i < h; ++i) {
        const double t = cache.h2[static_cast<std::size_t>(i)];
        dz2[static_cast<std::size_t>(i)] = dh2[static_cast<std::size_t>(i)] * (1.0 - t * t);
    }
    std::vector<double> dh1(static_cast<std::size_t>(h), 0.0);
    for (int i = 0; i < h; ++i) {
        const double g = dz2[static_cast<std::size_t>(i)];
        if (g == 0.0) continue;
        const double* row = net.w2.data() + static_cast<std::size_t>(i) * h;
        double* grow = grad.w2.data() + static_cast<std::size_t>(i) * h;
        for (int j = 0; j < h; ++j) {
            dh1[static_cast<std::size_t>(j)] += row[j] * g;
            grow[j] += g * cache.h1[static_cast<std::size_t>(j)];
        }
        grad.b2[static_cast<std::size_t>(i)] += g;
    }
    for (int i = 0; i < h; ++i) {
        const double t = cache.h1[static_cast<std::size_t>(i)];
        const double g = dh1[static_cast<std::size_t>(i)] * (1.0 - t * t);
        if (g == 0.0) continue;
        double* grow = grad.w1.data() + static_cast<std::size_t>(i) * net.input_dim;
        for (int j = 0; j < net.input_dim; ++j) {
            grow[j] += g * cache.x[static_cast<std::size_t>(j)];
        }
        grad.b1[static_cast<std::size_t>(i)] += g;
    }
}

// Adaptive-moment gradient descent on the flat parameter vector.
class Adam {
public:
    Adam(std::size_t n, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : m_(n, 0.0), v_(n, 0.0), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(std::vector<double>& params, const std::vector<double>& grads, double lr) {
        if (params.size() != m_.size() || grads.size() != m_.size()) {
            throw std::invalid_argument("optimizer dimension mismatch");
        }
        ++t_;
        const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
            v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
            params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
        }
    }

private:
    std::vector<double> m_, v_;
    double beta1_, beta2_, eps_;
    long t_ = 0;
};

// Scales the gradient down to the given global L2 norm if it exceeds it.
inline void clip_grad_norm(std::vector<double>& grads, double max_norm) {
    double sq = 0.0;
    for (double g : grads) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double s = max_norm / norm;
        for (double& g : grads) g *= s;
    }
}

}  // namespace tcs::ppo
