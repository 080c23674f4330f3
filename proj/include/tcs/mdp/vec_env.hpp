#pragma once

#include <cstdint>
#include <iostream>
#include <set>
#include <stdexcept>
#include <thread>
#include <vector>

#include "tcs/mdp/env.hpp"

namespace tcs::mdp {

// Runs independent workers over [0, n) with strided index assignment. Each
// index writes only its own output slot, so results are identical to a
// sequential loop regardless of scheduling.
template <typename Fn>
inline void parallel_for(int n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&fn, w, n, workers]() {
            for (int i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

// Fixed-size collection of environments stepped in lockstep. Instances hold
// no shared mutable state; stepping may fan out across threads and the
// results match the sequential order exactly.
template <typename Env>
class VecEnv {
public:
    explicit VecEnv(std::vector<Env> envs, int threads = 0)
        : envs_(std::move(envs)),
          threads_(threads > 0 ? threads
                               : static_cast<int>(std::thread::hardware_concurrency())) {
        if (envs_.empty()) throw std::invalid_argument("need at least one environment");
    }

    int size() const { return static_cast<int>(envs_.size()); }
    Env& env(int i) { return envs_[static_cast<std::size_t>(i)]; }
    const Env& env(int i) const { return envs_[static_cast<std::size_t>(i)]; }

    std::vector<std::vector<double>> reset_all(const std::vector<std::uint64_t>& seeds) {
        if (seeds.size() != envs_.size()) {
            throw std::invalid_argument("one seed per environment required");
        }
        if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
            std::cerr << "warning: duplicate environment seeds; trajectories will repeat\n";
        }
        std::vector<std::vector<double>> states(envs_.size());
        parallel_for(size(), threads_, [&](int i) {
            states[static_cast<std::size_t>(i)] =
                envs_[static_cast<std::size_t>(i)].reset(seeds[static_cast<std::size_t>(i)]);
        });
        return states;
    }

    std::vector<StepResult> step(const std::vector<std::vector<double>>& actions) {
        if (actions.size() != envs_.size()) {
            throw std::invalid_argument("one action per environment required");
        }
        std::vector<StepResult> results(envs_.size());
        parallel_for(size(), threads_, [&](int i) {
            results[static_cast<std::size_t>(i)] =
                envs_[static_cast<std::size_t>(i)].step(actions[static_cast<std::size_t>(i)]);
        });
        return results;
    }

private:
    std::vector<Env> envs_;
    int threads_;
};

}  // namespace tcs::mdp
