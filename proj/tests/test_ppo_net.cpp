#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "tcs/common/rng.hpp"
#include "tcs/ppo/checkpoint.hpp"
#include "tcs/ppo/gae.hpp"
#include "tcs/ppo/gaussian.hpp"
#include "tcs/ppo/net.hpp"

using namespace tcs;
using namespace tcs::ppo;

TEST_CASE("zero network outputs zero mean and value") {
    Mlp net(5, 2);
    auto out = forward(net, std::vector<double>(5, 1.3));
    CHECK(out.mean[0] == 0.0);
    CHECK(out.mean[1] == 0.0);
    CHECK(out.value == 0.0);
}

TEST_CASE("forward pass matches a hand-computed two-layer evaluation") {
    Mlp net(2, 1, 2);
    net.w1 = {0.3, -0.2, 0.5, 0.1};  // rows: hidden x input
    net.b1 = {0.1, -0.4};
    net.w2 = {0.7, 0.2, -0.3, 0.6};
    net.b2 = {0.05, 0.0};
    net.wa = {1.5, -0.8};
    net.ba = {0.2};
    net.wv = {0.4, 0.9};
    net.bv = -0.1;

    const std::vector<double> x = {0.6, -1.2};
    // written out layer by layer
    const double h1a = std::tanh(0.3 * 0.6 + (-0.2) * (-1.2) + 0.1);
    const double h1b = std::tanh(0.5 * 0.6 + 0.1 * (-1.2) - 0.4);
    const double h2a = std::tanh(0.7 * h1a + 0.2 * h1b + 0.05);
    const double h2b = std::tanh(-0.3 * h1a + 0.6 * h1b + 0.0);
    const double mean = 1.5 * h2a - 0.8 * h2b + 0.2;
    const double value = 0.4 * h2a + 0.9 * h2b - 0.1;

    auto out = forward(net, x);
    CHECK(out.mean[0] == doctest::Approx(mean).epsilon(1e-15));
    CHECK(out.value == doctest::Approx(value).epsilon(1e-15));
}

TEST_CASE("output changes are bounded by the product of weight norms") {
    Mlp net(6, 2);
    net.init(91);
    auto inf_row_norm = [](const std::vector<double>& w, int rows, int cols) {
        double best = 0.0;
        for (int i = 0; i < rows; ++i) {
            double s = 0.0;
            for (int j = 0; j < cols; ++j) s += std::abs(w[i * cols + j]);
            best = std::max(best, s);
        }
        return best;
    };
    // tanh is 1-Lipschitz, so the composition is bounded by the operator norms
    const double lip = inf_row_norm(net.wa, 2, 8) * inf_row_norm(net.w2, 8, 8) *
                       inf_row_norm(net.w1, 8, 6);

    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(6);
        for (double& v : x) v = rng.uniform(-2.0, 2.0);
        const double eps = 1e-3;
        auto base = forward(net, x);
        std::vector<double> xp = x;
        xp[rng.index(6)] += eps;
        auto pert = forward(net, xp);
        for (int a = 0; a < 2; ++a) {
            CHECK(std::abs(pert.mean[a] - base.mean[a]) <= lip * eps + 1e-12);
        }
    }
}

TEST_CASE("sampling collapses to the mean as the noise vanishes") {
    Rng rng(3);
    const std::vector<double> mean = {1.5, -2.0};
    const std::vector<double> tiny = {-40.0, -40.0};
    for (int i = 0; i < 20; ++i) {
        auto s = sample_action(mean, tiny, rng);
        CHECK(s.action[0] == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(s.action[1] == doctest::Approx(-2.0).epsilon(1e-12));
    }
}

TEST_CASE("log density at the mean of a unit gaussian") {
    const std::vector<double> mean = {0.7};
    const std::vector<double> ls = {0.0};
    CHECK(log_prob(mean, ls, mean) == doctest::Approx(-0.5 * kLogTwoPi).epsilon(1e-15));
    const std::vector<double> mean3 = {0.7, -0.1, 2.0};
    const std::vector<double> ls3 = {0.0, 0.0, 0.0};
    CHECK(log_prob(mean3, ls3, mean3) ==
          doctest::Approx(-1.5 * kLogTwoPi).epsilon(1e-15));
}

TEST_CASE("sampled actions average to the mean within three standard errors") {
    Rng rng(17);
    const std::vector<double> mean = {2.5};
    const std::vector<double> ls = {-0.5};
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_action(mean, ls, rng).action[0];
    const double avg = sum / n;
    const double se = std::exp(-0.5) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(avg - 2.5) <= 3.0 * se);
}

TEST_CASE("sample log-prob agrees with the density at the sampled point") {
    Rng rng(23);
    const std::vector<double> mean = {0.3, -1.2};
    const std::vector<double> ls = {-1.0, 0.5};
    for (int i = 0; i < 100; ++i) {
        auto s = sample_action(mean, ls, rng);
        CHECK(s.log_prob == doctest::Approx(log_prob(mean, ls, s.action)).epsilon(1e-12));
    }
}

TEST_CASE("gaussian entropy closed form and monotonicity") {
    CHECK(entropy({0.0}) == doctest::Approx(0.5 * std::log(2.0 * 3.14159265358979324 *
                                                           std::exp(1.0)))
                                .epsilon(1e-12));
    CHECK(entropy({0.0}) == doctest::Approx(1.41894).epsilon(1e-5));
    CHECK(entropy({-1.0, -1.0, -1.0}) == doctest::Approx(1.25681).epsilon(1e-5));
    // monotone in each coordinate
    CHECK(entropy({-0.5, 0.2}) < entropy({-0.4, 0.2}));
    CHECK(entropy({-0.5, 0.2}) < entropy({-0.5, 0.3}));
}

TEST_CASE("returns-to-go advantages at gamma = lambda = 1") {
    auto g = compute_gae({1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, {0, 0, 1}, 0.0, 1.0, 1.0);
    CHECK(g.advantages == std::vector<double>{3.0, 2.0, 1.0});
    CHECK(g.returns == std::vector<double>{3.0, 2.0, 1.0});

    // a critic that already predicts the returns has zero advantage
    auto z = compute_gae({1.0, 1.0, 1.0}, {3.0, 2.0, 1.0}, {0, 0, 1}, 0.0, 1.0, 1.0);
    CHECK(z.advantages == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("gae matches the brute-force double sum") {
    Rng rng(31);
    const double gamma = 0.9;
    const double lambda = 0.8;
    const std::size_t n = 12;
    std::vector<double> rewards(n), values(n);
    for (auto& r : rewards) r = rng.uniform(-2.0, 2.0);
    for (auto& v : values) v = rng.uniform(-2.0, 2.0);
    const double last_value = rng.uniform(-2.0, 2.0);
    std::vector<std::uint8_t> dones(n, 0);  // single truncated trajectory

    auto g = compute_gae(rewards, values, dones, last_value, gamma, lambda);

    // brute force: A_t = sum_l (gamma*lambda)^l * delta_{t+l}
    for (std::size_t t = 0; t < n; ++t) {
        double a = 0.0;
        for (std::size_t l = t; l < n; ++l) {
            const double next_v = (l + 1 < n) ? values[l + 1] : last_value;
            const double delta = rewards[l] + gamma * next_v - values[l];
            a += std::pow(gamma * lambda, static_cast<double>(l - t)) * delta;
        }
        CHECK(g.advantages[t] == doctest::Approx(a).epsilon(1e-12));
        CHECK(g.returns[t] == doctest::Approx(a + values[t]).epsilon(1e-12));
    }

    CHECK_THROWS(compute_gae({1.0}, {1.0, 2.0}, {0}, 0.0, 1.0, 1.0));
}

TEST_CASE("gae respects episode boundaries") {
    // two episodes of two steps each, all rewards 1, zero values
    auto g = compute_gae({1.0, 1.0, 1.0, 1.0}, {0.0, 0.0, 0.0, 0.0}, {0, 1, 0, 1}, 99.0,
                         1.0, 1.0);
    CHECK(g.advantages == std::vector<double>{2.0, 1.0, 2.0, 1.0});
}

TEST_CASE("flat parameter round trip and adam at zero learning rate") {
    Mlp net(4, 2);
    net.init(7);
    const auto flat = net.to_flat();
    CHECK(flat.size() == net.param_count());
    Mlp copy(4, 2);
    copy.from_flat(flat);
    CHECK(copy.to_flat() == flat);

    Adam adam(flat.size());
    std::vector<double> params = flat;
    std::vector<double> grads(flat.size(), 1.0);
    adam.step(params, grads, 0.0);
    CHECK(params == flat);
}

TEST_CASE("adam descends a quadratic bowl") {
    // minimize (x - 4)^2 in a few hundred steps
    std::vector<double> x = {0.0};
    Adam adam(1);
    for (int i = 0; i < 600; ++i) {
        std::vector<double> g = {2.0 * (x[0] - 4.0)};
        adam.step(x, g, 0.05);
    }
    CHECK(x[0] == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("gradient clipping caps the global norm") {
    std::vector<double> g = {3.0, 4.0};  // norm 5
    clip_grad_norm(g, 0.5);
    CHECK(std::sqrt(g[0] * g[0] + g[1] * g[1]) == doctest::Approx(0.5).epsilon(1e-12));
    std::vector<double> small = {0.1, 0.1};
    auto saved = small;
    clip_grad_norm(small, 0.5);
    CHECK(small == saved);
}

TEST_CASE("checkpoints round-trip the network exactly") {
    Mlp net(9, 3);
    net.init(77, -0.7);
    const std::string path = "ckpt_roundtrip_test.bin";
    save_checkpoint(net, path, "hash123");
    auto ck = load_checkpoint(path);
    CHECK(ck.config_hash == "hash123");
    CHECK(ck.net.input_dim == 9);
    CHECK(ck.net.action_dim == 3);
    CHECK(ck.net.to_flat() == net.to_flat());
    std::remove(path.c_str());
}
