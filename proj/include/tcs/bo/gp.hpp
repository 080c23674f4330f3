#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tcs::bo {

// Dense lower-triangular Cholesky factorization; returns false if the matrix
// is not positive definite at this jitter level.
inline bool cholesky(std::vector<double>& a, int n) {
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k) {
                s -= a[static_cast<std::size_t>(i) * n + k] *
                     a[static_cast<std::size_t>(j) * n + k];
            }
            if (i == j) {
                if (s <= 0.0) return false;
                a[static_cast<std::size_t>(i) * n + j] = std::sqrt(s);
            } else {
                a[static_cast<std::size_t>(i) * n + j] =
                    s / a[static_cast<std::size_t>(j) * n + j];
            }
        }
        for (int j = i + 1; j < n; ++j) a[static_cast<std::size_t>(i) * n + j] = 0.0;
    }
    return true;
}

inline void solve_lower(const std::vector<double>& l, int n, std::vector<double>& b) {
    for (int i = 0; i < n; ++i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) {
            s -= l[static_cast<std::size_t>(i) * n + k] * b[static_cast<std::size_t>(k)];
        }
        b[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i) * n + i];
    }
}

inline void solve_upper_from_lower(const std::vector<double>& l, int n,
                                   std::vector<double>& b) {
    for (int i = n - 1; i >= 0; --i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k) {
            s -= l[static_cast<std::size_t>(k) * n + i] * b[static_cast<std::size_t>(k)];
        }
        b[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i) * n + i];
    }
}

struct GpHyperparams {
    double length_scale = 0.2;  // isotropic, on inputs normalized to [0,1]
    double signal_var = 1.0;
    double noise_var = 1e-4;
};

struct GpPrediction {
    double mean = 0.0;
    double var = 0.0;
};

// Gaussian-process regression with a squared-exponential kernel on inputs
// normalized to the unit cube. Hyperparameters are picked from a small grid
// by marginal likelihood, so the fit is deterministic and dependency-free.
class GpSurrogate {
public:
    GpSurrogate() = default;

    // `x` holds normalized points (each in [0,1]^d). Near-duplicate inputs
    // are nudged apart deterministically before factorization.
    static GpSurrogate fit(std::vector<std::vector<double>> x, std::vector<double> y) {
        if (x.size() != y.size() || x.size() < 2) {
            throw std::invalid_argument("gp fit needs at least two observations");
        }
        GpSurrogate gp;
        gp.dim_ = static_cast<int>(x[0].size());
        jitter_duplicates(x);
        gp.x_ = std::move(x);

        gp.y_mean_ = 0.0;
        for (double v : y) gp.y_mean_ += v;
        gp.y_mean_ /= static_cast<double>(y.size());
        gp.center_targets(y);

        double var_y = 0.0;
        for (double v : gp.y_) var_y += v * v;
        var_y = std::max(var_y / static_cast<double>(gp.y_.size()), 1e-12);

        double best_ll = -std::numeric_limits<double>::infinity();
        GpSurrogate best;
        for (double ls : {0.05, 0.1, 0.2, 0.4, 0.8}) {
            for (double sv_mult : {0.25, 1.0, 4.0}) {
                for (double nv_mult : {1e-6, 1e-4, 1e-2}) {
                    GpSurrogate cand = gp;
                    cand.hp_ = GpHyperparams{ls, var_y * sv_mult,
                                             std::max(var_y * nv_mult, 1e-10)};
                    double ll;
                    if (cand.factorize(ll) && ll > best_ll) {
                        best_ll = ll;
                        best = std::move(cand);
                    }
                }
            }
        }
        if (!std::isfinite(best_ll)) {
            throw std::runtime_error("gp fit failed for every hyperparameter choice");
        }
        return best;
    }

    GpPrediction predict(const std::vector<double>& x) const {
        const int n = static_cast<int>(x_.size());
        std::vector<double> k(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) k[static_cast<std::size_t>(i)] = kernel(x_[static_cast<std::size_t>(i)], x);
        GpPrediction p;
        for (int i = 0; i < n; ++i) p.mean += k[static_cast<std::size_t>(i)] * alpha_[static_cast<std::size_t>(i)];
        p.mean += y_mean_;
        // var = k(x,x) - ||L^{-1} k||^2, floored at zero against rounding
        std::vector<double> v = k;
        solve_lower(l_, n, v);
        double reduction = 0.0;
        for (double t : v) reduction += t * t;
        p.var = std::max(0.0, hp_.signal_var - reduction);
        return p;
    }

    const GpHyperparams& hyperparams() const { return hp_; }
    int dim() const { return dim_; }

private:
    void center_targets(const std::vector<double>& y) {
        y_.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) y_[i] = y[i] - y_mean_;
    }

    static void jitter_duplicates(std::vector<std::vector<double>>& x) {
        for (std::size_t i = 1; i < x.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                double dist = 0.0;
                for (std::size_t d = 0; d < x[i].size(); ++d) {
                    dist += std::abs(x[i][d] - x[j][d]);
                }
                if (dist < 1e-9) {
                    for (std::size_t d = 0; d < x[i].size(); ++d) {
                        x[i][d] += 1e-5 * static_cast<double>(i + d + 1);
                    }
                }
            }
        }
    }

    double kernel(const std::vector<double>& a, const std::vector<double>& b) const {
        double sq = 0.0;
        for (int d = 0; d < dim_; ++d) {
            const double t = (a[static_cast<std::size_t>(d)] - b[static_cast<std::size_t>(d)]) / hp_.length_scale;
            sq += t * t;
        }
        return hp_.signal_var * std::exp(-0.5 * sq);
    }

    bool factorize(double& log_likelihood) {
        const int n = static_cast<int>(x_.size());
        l_.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                l_[static_cast<std::size_t>(i) * n + j] = kernel(x_[static_cast<std::size_t>(i)], x_[static_cast<std::size_t>(j)]);
            }
            l_[static_cast<std::size_t>(i) * n + i] += hp_.noise_var;
        }
        // escalate jitter until the factorization succeeds
        double jitter = 0.0;
        for (int attempt = 0; attempt < 8; ++attempt) {
            std::vector<double> a = l_;
            if (jitter > 0.0) {
                for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i) * n + i] += jitter;
            }
            if (cholesky(a, n)) {
                l_ = std::move(a);
                alpha_ = y_;
                solve_lower(l_, n, alpha_);
                double quad = 0.0;
                double logdet = 0.0;
                for (int i = 0; i < n; ++i) {
                    quad += alpha_[static_cast<std::size_t>(i)] * alpha_[static_cast<std::size_t>(i)];
                    logdet += std::log(l_[static_cast<std::size_t>(i) * n + i]);
                }
                solve_upper_from_lower(l_, n, alpha_);
                log_likelihood = -0.5 * quad - logdet -
                                 0.5 * n * std::log(2.0 * 3.14159265358979323846);
                return true;
            }
            jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
        }
        return false;
    }

    int dim_ = 0;
    std::vector<std::vector<double>> x_;
    std::vector<double> y_;
    double y_mean_ = 0.0;
    GpHyperparams hp_;
    std::vector<double> l_;      // cholesky factor of K + noise
    std::vector<double> alpha_;  // (K + noise)^{-1} (y - mean)
};

}  // namespace tcs::bo
