#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "support/stub_env.hpp"
#include "tcs/common/rng.hpp"
#include "tcs/ppo/buffer.hpp"
#include "tcs/ppo/train.hpp"
#include "tcs/ppo/update.hpp"

using namespace tcs;
using namespace tcs::ppo;

namespace {

// toy setting: 3 inputs, hidden width 2, 2 actions -> 25 parameters
constexpr int kIn = 3;
constexpr int kAct = 2;
constexpr int kHidden = 2;

Mlp toy_net(std::uint64_t seed) {
    Mlp net(kIn, kAct, kHidden);
    net.init(seed);
    // move weights off their small initialization so outputs are not tiny
    Rng rng(seed + 1);
    auto flat = net.to_flat();
    for (double& p : flat) p += rng.uniform(-0.4, 0.4);
    net.from_flat(flat);
    return net;
}

// Rollout buffer for gradient tests. With `off_policy` the recorded log
// probabilities come from a different behavior net, so importance ratios sit
// away from one; update tests use on-policy data as the trainer would.
RolloutBuffer toy_buffer(const Mlp& learner, std::uint64_t seed, bool off_policy = true) {
    Mlp behavior = off_policy ? toy_net(seed + 50) : learner;
    RolloutBuffer buf(4, 2, kIn, kAct);
    Rng rng(seed);
    for (int t = 0; t < 4; ++t) {
        for (int e = 0; e < 2; ++e) {
            std::vector<double> s(kIn), s_next(kIn);
            for (double& x : s) x = rng.uniform(-1.0, 1.0);
            for (double& x : s_next) x = rng.uniform(-1.0, 1.0);
            const MlpOut b = forward(behavior, s);
            GaussianSample a = sample_action(b.mean, behavior.log_std, rng);
            const double reward = rng.uniform(-1.0, 1.0);
            const double value = forward(learner, s).value;
            buf.record(t, e, s, s_next, a.action, a.log_prob, reward, value, t == 3);
        }
    }
    buf.finalize({0.0, 0.0}, 1.0, 1.0, false);
    return buf;
}

std::vector<std::vector<double>> fixed_noise(std::size_t rows, double scale,
                                             std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> noise(rows, std::vector<double>(kIn, 0.0));
    for (auto& v : noise) {
        for (double& x : v) x = scale * rng.normal();
    }
    return noise;
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({1e-8, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("clipped surrogate: closed-form points") {
    // ratio 1.5, advantage 1: the clip at 1.2 binds
    auto hi = clipped_surrogate(std::log(1.5), 0.0, 1.0, 0.2);
    CHECK(hi.value == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(hi.d_log_prob_new == 0.0);

    // ratio 0.5, advantage 1: the raw term is smaller and stays active
    auto lo = clipped_surrogate(std::log(0.5), 0.0, 1.0, 0.2);
    CHECK(lo.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(lo.d_log_prob_new == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("clipped surrogate matches an independent scalar evaluation on a grid") {
    for (double ratio : {0.3, 0.7, 0.9, 1.0, 1.1, 1.3, 2.0}) {
        for (double adv : {-2.0, -0.5, 0.5, 2.0}) {
            const double expected =
                std::min(ratio * adv, std::clamp(ratio, 0.8, 1.2) * adv);
            auto s = clipped_surrogate(std::log(ratio), 0.0, adv, 0.2);
            CHECK(s.value == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("clip dead zone: the surrogate is flat in the new log-prob") {
    // ratio above the band with positive advantage
    auto s = clipped_surrogate(std::log(1.6), 0.0, 2.0, 0.2);
    CHECK(s.d_log_prob_new == 0.0);
    for (double delta : {-1e-4, 1e-4, 1e-2}) {
        auto p = clipped_surrogate(std::log(1.6) + delta, 0.0, 2.0, 0.2);
        CHECK(p.value == s.value);
    }
    // ratio below the band with negative advantage
    auto s2 = clipped_surrogate(std::log(0.5), 0.0, -1.5, 0.2);
    CHECK(s2.d_log_prob_new == 0.0);
    for (double delta : {-1e-4, 1e-4, 1e-2}) {
        auto p = clipped_surrogate(std::log(0.5) + delta, 0.0, -1.5, 0.2);
        CHECK(p.value == s2.value);
    }
}

TEST_CASE("analytic gradients match central finite differences in every mode") {
    for (CapsMode mode : {CapsMode::kNone, CapsMode::kTemporalL1, CapsMode::kTemporalL2,
                          CapsMode::kSpatialL1, CapsMode::kSpatialL2}) {
        CAPTURE(caps_mode_name(mode));
        Mlp net = toy_net(11);
        RolloutBuffer buf = toy_buffer(net, 101);
        TrainConfig cfg;
        cfg.caps_mode = mode;
        cfg.caps_temporal_weight = 0.3;  // large enough to dominate rounding
        cfg.caps_spatial_weight = 0.3;
        cfg.spatial_noise = 0.1;
        std::vector<std::size_t> indices(buf.size());
        for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
        const auto noise = fixed_noise(indices.size(), cfg.spatial_noise, 77);

        Mlp grad = net.zeros_like();
        minibatch_loss(net, buf, indices, cfg, noise, &grad);
        const std::vector<double> analytic = grad.to_flat();

        std::vector<double> params = net.to_flat();
        REQUIRE(params.size() == 25);
        const double h = 1e-6;
        double worst = 0.0;
        for (std::size_t p = 0; p < params.size(); ++p) {
            Mlp plus = net;
            Mlp minus = net;
            auto pp = params;
            pp[p] += h;
            plus.from_flat(pp);
            pp[p] -= 2.0 * h;
            minus.from_flat(pp);
            const double lp = minibatch_loss(plus, buf, indices, cfg, noise, nullptr).total;
            const double lm = minibatch_loss(minus, buf, indices, cfg, noise, nullptr).total;
            const double fd = (lp - lm) / (2.0 * h);
            worst = std::max(worst, relative_error(analytic[p], fd));
        }
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("constant policy has exactly zero smoothness penalties") {
    Mlp net(kIn, kAct, kHidden);  // all-zero weights: identical output everywhere
    RolloutBuffer buf = toy_buffer(net, 303);
    std::vector<std::size_t> indices(buf.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;

    TrainConfig temporal;
    temporal.caps_mode = CapsMode::kTemporalL2;
    auto lt = minibatch_loss(net, buf, indices, temporal, {}, nullptr);
    CHECK(lt.temporal == 0.0);

    TrainConfig spatial;
    spatial.caps_mode = CapsMode::kSpatialL1;
    auto ls = minibatch_loss(net, buf, indices, spatial,
                             fixed_noise(indices.size(), 0.3, 9), nullptr);
    CHECK(ls.spatial == 0.0);
}

TEST_CASE("zero spatial noise gives exactly zero spatial penalty") {
    Mlp net = toy_net(21);
    RolloutBuffer buf = toy_buffer(net, 404);
    std::vector<std::size_t> indices(buf.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    TrainConfig cfg;
    cfg.caps_mode = CapsMode::kSpatialL2;
    auto loss = minibatch_loss(net, buf, indices, cfg,
                               fixed_noise(indices.size(), 0.0, 5), nullptr);
    CHECK(loss.spatial == 0.0);
}

TEST_CASE("with smoothness off the objective is the plain clipped objective") {
    Mlp net = toy_net(31);
    RolloutBuffer buf = toy_buffer(net, 505);
    std::vector<std::size_t> indices(buf.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    TrainConfig cfg;
    cfg.caps_mode = CapsMode::kNone;

    auto loss = minibatch_loss(net, buf, indices, cfg, {}, nullptr);
    CHECK(loss.temporal == 0.0);
    CHECK(loss.spatial == 0.0);

    // independent evaluation of the plain objective, sample by sample
    double surrogate = 0.0;
    for (std::size_t i : indices) {
        std::vector<double> s(buf.state(i), buf.state(i) + kIn);
        std::vector<double> a(buf.action(i), buf.action(i) + kAct);
        const MlpOut o = forward(net, s);
        const double ratio = std::exp(log_prob(o.mean, net.log_std, a) - buf.log_prob(i));
        surrogate += std::min(ratio * buf.advantage(i),
                              std::clamp(ratio, 0.8, 1.2) * buf.advantage(i));
    }
    surrogate /= static_cast<double>(indices.size());
    const double plain_objective = surrogate + cfg.entropy_coef * entropy(net.log_std);
    const double from_loss = -(loss.total - cfg.value_coef * loss.value_loss);
    CHECK(from_loss == doctest::Approx(plain_objective).epsilon(1e-15));
}

TEST_CASE("spatial smoothness of a linear map matches a monte-carlo oracle") {
    // distance semantics on a linear policy: E D(Ws, W(s + n*z)) = n * E||Wz||
    const std::vector<std::vector<double>> w = {{0.7, -0.3, 0.2}, {0.1, 0.5, -0.4}};
    auto apply = [&w](const std::vector<double>& x) {
        std::vector<double> y(2, 0.0);
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 3; ++c) y[r] += w[r][c] * x[c];
        }
        return y;
    };
    const double noise = 0.05;
    const std::vector<double> s = {0.4, -0.2, 0.9};
    const auto base = apply(s);

    Rng rng(61);
    const int n = 200000;
    double via_distance = 0.0;
    for (int i = 0; i < n; ++i) {
        std::vector<double> sp = s;
        for (double& x : sp) x += noise * rng.normal();
        via_distance += caps_distance(base, apply(sp), false, 0.0, nullptr, nullptr);
    }
    via_distance /= n;

    Rng rng2(62);
    double oracle = 0.0;
    for (int i = 0; i < n; ++i) {
        std::vector<double> z(3);
        for (double& x : z) x = rng2.normal();
        const auto wz = apply(z);
        oracle += noise * std::sqrt(wz[0] * wz[0] + wz[1] * wz[1]);
    }
    oracle /= n;

    CHECK(via_distance == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("gae identity through the buffer: advantages plus values are returns-to-go") {
    // integer-valued data keeps the arithmetic exact
    RolloutBuffer buf(6, 1, 1, 1);
    const std::vector<double> rewards = {1.0, 2.0, -1.0, 3.0, 0.0, 2.0};
    const std::vector<double> values = {5.0, -2.0, 1.0, 4.0, -3.0, 2.0};
    for (int t = 0; t < 6; ++t) {
        buf.record(t, 0, {0.0}, {0.0}, {0.0}, 0.0, rewards[t], values[t], t == 5);
    }
    buf.finalize({0.0}, 1.0, 1.0, false);
    for (int t = 0; t < 6; ++t) {
        double rtg = 0.0;
        for (int k = t; k < 6; ++k) rtg += rewards[k];
        CHECK(buf.advantage(t) + values[t] == rtg);  // exact
        CHECK(buf.return_at(t) == rtg);
    }
}

TEST_CASE("rollout buffer capacity is steps times environments") {
    RolloutBuffer b32(60, 32, 4, 3);
    CHECK(b32.size() == 1920);
    RolloutBuffer b40(60, 40, 4, 1);
    CHECK(b40.size() == 2400);
}

TEST_CASE("zero smoothness weights reduce the total to the plain objective") {
    Mlp net = toy_net(35);
    RolloutBuffer buf = toy_buffer(net, 515);
    std::vector<std::size_t> indices(buf.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;

    TrainConfig plain;
    plain.caps_mode = CapsMode::kNone;
    TrainConfig weightless;
    weightless.caps_mode = CapsMode::kTemporalL2;
    weightless.caps_temporal_weight = 0.0;

    const auto a = minibatch_loss(net, buf, indices, plain, {}, nullptr);
    const auto b = minibatch_loss(net, buf, indices, weightless, {}, nullptr);
    CHECK(a.total == b.total);
    CHECK(b.temporal > 0.0);  // measured but unweighted
}

TEST_CASE("advantage normalization spans the whole update") {
    RolloutBuffer buf(4, 2, 1, 1);
    Rng rng(8);
    for (int t = 0; t < 4; ++t) {
        for (int e = 0; e < 2; ++e) {
            buf.record(t, e, {0.5}, {0.5}, {0.1}, -1.0, rng.uniform(-3.0, 3.0),
                       rng.uniform(-1.0, 1.0), t == 3);
        }
    }
    buf.finalize({0.0, 0.0}, 1.0, 1.0, true);
    double mean = 0.0;
    double var = 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i) mean += buf.advantage(i);
    mean /= static_cast<double>(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        var += (buf.advantage(i) - mean) * (buf.advantage(i) - mean);
    }
    var /= static_cast<double>(buf.size());
    CHECK(std::abs(mean) < 1e-12);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("update with zero learning rate leaves parameters unchanged") {
    Mlp net = toy_net(41);
    const auto before = net.to_flat();
    RolloutBuffer buf = toy_buffer(net, 606, /*off_policy=*/false);
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.batch_size = 4;
    cfg.n_epoch = 2;
    Adam adam(net.param_count());
    Rng rng(1);
    auto stats = update(net, adam, buf, cfg, rng);
    CHECK(net.to_flat() == before);
    CHECK(stats.minibatches_applied == 4);
}

TEST_CASE("divergence early stop halts before applying the tripping minibatch") {
    Mlp net = toy_net(51);
    // uniformly bad on-policy advantages: the update pushes every sampled
    // action's probability down, which the simple divergence estimator
    // mean(logp_old - logp_new) registers as positive drift
    RolloutBuffer buf(4, 2, kIn, kAct);
    Rng fill(707);
    for (int t = 0; t < 4; ++t) {
        for (int e = 0; e < 2; ++e) {
            std::vector<double> s(kIn), s_next(kIn);
            for (double& x : s) x = fill.uniform(-1.0, 1.0);
            for (double& x : s_next) x = fill.uniform(-1.0, 1.0);
            const MlpOut o = forward(net, s);
            GaussianSample a = sample_action(o.mean, net.log_std, fill);
            buf.record(t, e, s, s_next, a.action, a.log_prob, -1.0, 0.0, t == 3);
        }
    }
    buf.finalize({0.0, 0.0}, 1.0, 1.0, false);  // advantages all negative

    TrainConfig cfg;
    // above recomputation rounding, far below one update's worth of drift
    cfg.kl_limit = 1e-6;
    cfg.batch_size = static_cast<int>(buf.size());
    cfg.n_epoch = 5;
    cfg.learning_rate = 0.05;
    cfg.normalize_advantages = false;
    Adam adam(net.param_count());
    Rng rng(2);
    auto stats = update(net, adam, buf, cfg, rng);
    // epoch 1: divergence of the unchanged policy is 0, so it applies once;
    // epoch 2 measures positive divergence and stops without applying
    CHECK(stats.minibatches_applied == 1);
    CHECK(stats.early_stopped);
    CHECK(stats.epochs_run == 2);
}

TEST_CASE("non-finite rollouts abort the update") {
    Mlp net = toy_net(71);
    RolloutBuffer buf(2, 1, kIn, kAct);
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double> s = {0.1, 0.2, 0.3};
    const std::vector<double> a = {0.0, 0.0};
    const double lp = log_prob(forward(net, s).mean, net.log_std, a);
    buf.record(0, 0, s, s, a, lp, inf, 0.0, false);
    buf.record(1, 0, s, s, a, lp, inf, 0.0, true);
    buf.finalize({0.0}, 1.0, 1.0, false);
    TrainConfig cfg;
    cfg.batch_size = 2;
    Adam adam(net.param_count());
    Rng rng(3);
    CHECK_THROWS_AS(update(net, adam, buf, cfg, rng), std::runtime_error);
}

TEST_CASE("training on the stub environment is deterministic and thread-invariant") {
    TrainConfig cfg;
    cfg.n_env = 4;
    cfg.n_steps = 20;
    cfg.batch_size = 80;
    cfg.n_epoch = 4;

    auto factory = [](int) { return tcs_test::StubQuadEnv(20); };
    auto a = train(factory, cfg, 5, 12345, 1);
    auto b = train(factory, cfg, 5, 12345, 2);
    REQUIRE(a.curves.size() == 5);
    REQUIRE(b.curves.size() == 5);
    for (std::size_t i = 0; i < a.curves.size(); ++i) {
        CHECK(a.curves[i].mean_return == b.curves[i].mean_return);
        CHECK(a.curves[i].kl == b.curves[i].kl);
        CHECK(a.curves[i].toll_m_mean == b.curves[i].toll_m_mean);
    }
    CHECK(a.net.to_flat() == b.net.to_flat());
    CHECK(a.net.all_finite());

    // zero iterations: parameters stay at their seeded initialization
    auto zero = train(factory, cfg, 0, 999, 1);
    Mlp fresh(2, 1, cfg.hidden_dim);
    fresh.init(999, cfg.init_log_std);
    CHECK(zero.net.to_flat() == fresh.to_flat());
    CHECK(zero.curves.empty());
}

TEST_CASE("training improves the stub return") {
    TrainConfig cfg;
    cfg.n_env = 8;
    cfg.n_steps = 30;
    cfg.batch_size = 240;
    cfg.n_epoch = 6;
    auto factory = [](int) { return tcs_test::StubQuadEnv(30); };
    auto r = train(factory, cfg, 40, 7, 2);
    double early = 0.0;
    double late = 0.0;
    for (int i = 0; i < 5; ++i) early += r.curves[static_cast<std::size_t>(i)].mean_return;
    for (int i = 35; i < 40; ++i) late += r.curves[static_cast<std::size_t>(i)].mean_return;
    CHECK(late / 5.0 > early / 5.0);
}
