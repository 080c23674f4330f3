#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcs/bo/bo.hpp"
#include "tcs/exp/emit.hpp"
#include "tcs/exp/metrics.hpp"
#include "tcs/mdp/env.hpp"
#include "tcs/ppo/checkpoint.hpp"
#include "tcs/ppo/train.hpp"

namespace tcs::lab {

// Everything one experiment needs: the scenario, the episode wiring, the
// trainer settings, and the run bookkeeping (budgets, seeds, output).
struct LabConfig {
    ScenarioConfig scenario = desk_scale_scenario();
    mdp::EpisodeConfig episode;
    ppo::TrainConfig train = ppo::train_config_1d();
    int bo_init = 10;
    int bo_iters = 100;
    int train_iters = 150;
    int days = 60;
    int metrics_window = 6;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    std::string out_dir = "out";
    int threads = 0;

    void set_action_dim(int dims) {
        episode.action_dim = dims;
        const ppo::TrainConfig preset =
            dims == 3 ? ppo::train_config_3d() : ppo::train_config_1d();
        train.batch_size = preset.batch_size;
        train.n_epoch = preset.n_epoch;
        train.n_env = preset.n_env;
    }
};

inline nlohmann::json episode_to_json(const mdp::EpisodeConfig& e) {
    return nlohmann::json{{"horizon", e.horizon},
                          {"action_dim", e.action_dim},
                          {"fixed_center", e.fixed_center},
                          {"fixed_width", e.fixed_width},
                          {"pt_target", e.pt_target},
                          {"initial_toll_m", e.initial_toll.amplitude},
                          {"initial_toll_mu", e.initial_toll.center},
                          {"initial_toll_sigma", e.initial_toll.width},
                          {"price_norm", e.price_norm},
                          {"discount", e.discount}};
}

inline mdp::EpisodeConfig episode_from_json(const nlohmann::json& j,
                                            mdp::EpisodeConfig e = {}) {
    e.horizon = j.value("horizon", e.horizon);
    e.action_dim = j.value("action_dim", e.action_dim);
    e.fixed_center = j.value("fixed_center", e.fixed_center);
    e.fixed_width = j.value("fixed_width", e.fixed_width);
    e.pt_target = j.value("pt_target", e.pt_target);
    e.initial_toll.amplitude = j.value("initial_toll_m", e.initial_toll.amplitude);
    e.initial_toll.center = j.value("initial_toll_mu", e.initial_toll.center);
    e.initial_toll.width = j.value("initial_toll_sigma", e.initial_toll.width);
    e.price_norm = j.value("price_norm", e.price_norm);
    e.discount = j.value("discount", e.discount);
    return e;
}

inline nlohmann::json train_to_json(const ppo::TrainConfig& t) {
    return nlohmann::json{{"learning_rate", t.learning_rate},
                          {"clip_range", t.clip_range},
                          {"discount", t.discount},
                          {"gae_lambda", t.gae_lambda},
                          {"entropy_coef", t.entropy_coef},
                          {"value_coef", t.value_coef},
                          {"kl_limit", t.kl_limit},
                          {"batch_size", t.batch_size},
                          {"n_epoch", t.n_epoch},
                          {"n_steps", t.n_steps},
                          {"n_env", t.n_env},
                          {"hidden_dim", t.hidden_dim},
                          {"init_log_std", t.init_log_std},
                          {"caps_mode", ppo::caps_mode_name(t.caps_mode)},
                          {"caps_temporal_weight", t.caps_temporal_weight},
                          {"caps_spatial_weight", t.caps_spatial_weight},
                          {"spatial_noise", t.spatial_noise},
                          {"normalize_advantages", t.normalize_advantages},
                          {"max_grad_norm", t.max_grad_norm},
                          {"reward_scale", t.reward_scale},
                          {"log_std_min", t.log_std_min},
                          {"log_std_max", t.log_std_max}};
}

inline ppo::TrainConfig train_from_json(const nlohmann::json& j, ppo::TrainConfig t = {}) {
    t.learning_rate = j.value("learning_rate", t.learning_rate);
    t.clip_range = j.value("clip_range", t.clip_range);
    t.discount = j.value("discount", t.discount);
    t.gae_lambda = j.value("gae_lambda", t.gae_lambda);
    t.entropy_coef = j.value("entropy_coef", t.entropy_coef);
    t.value_coef = j.value("value_coef", t.value_coef);
    t.kl_limit = j.value("kl_limit", t.kl_limit);
    t.batch_size = j.value("batch_size", t.batch_size);
    t.n_epoch = j.value("n_epoch", t.n_epoch);
    t.n_steps = j.value("n_steps", t.n_steps);
    t.n_env = j.value("n_env", t.n_env);
    t.hidden_dim = j.value("hidden_dim", t.hidden_dim);
    t.init_log_std = j.value("init_log_std", t.init_log_std);
    if (j.contains("caps_mode")) {
        t.caps_mode = ppo::caps_mode_from_name(j.at("caps_mode").get<std::string>());
    }
    t.caps_temporal_weight = j.value("caps_temporal_weight", t.caps_temporal_weight);
    t.caps_spatial_weight = j.value("caps_spatial_weight", t.caps_spatial_weight);
    t.spatial_noise = j.value("spatial_noise", t.spatial_noise);
    t.normalize_advantages = j.value("normalize_advantages", t.normalize_advantages);
    t.max_grad_norm = j.value("max_grad_norm", t.max_grad_norm);
    t.reward_scale = j.value("reward_scale", t.reward_scale);
    t.log_std_min = j.value("log_std_min", t.log_std_min);
    t.log_std_max = j.value("log_std_max", t.log_std_max);
    return t;
}

inline nlohmann::json lab_to_json(const LabConfig& cfg) {
    nlohmann::json j;
    j["scenario"] = cfg.scenario;
    j["episode"] = episode_to_json(cfg.episode);
    j["train"] = train_to_json(cfg.train);
    j["bo_init"] = cfg.bo_init;
    j["bo_iters"] = cfg.bo_iters;
    j["train_iters"] = cfg.train_iters;
    j["days"] = cfg.days;
    j["metrics_window"] = cfg.metrics_window;
    j["seeds"] = cfg.seeds;
    return j;
}

inline LabConfig lab_from_json(const nlohmann::json& j, LabConfig cfg = {}) {
    if (j.contains("scenario")) from_json(j.at("scenario"), cfg.scenario);
    if (j.contains("episode")) cfg.episode = episode_from_json(j.at("episode"), cfg.episode);
    if (j.contains("train")) cfg.train = train_from_json(j.at("train"), cfg.train);
    cfg.bo_init = j.value("bo_init", cfg.bo_init);
    cfg.bo_iters = j.value("bo_iters", cfg.bo_iters);
    cfg.train_iters = j.value("train_iters", cfg.train_iters);
    cfg.days = j.value("days", cfg.days);
    cfg.metrics_window = j.value("metrics_window", cfg.metrics_window);
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    return cfg;
}

inline std::string config_hash(const LabConfig& cfg, const std::string& kind) {
    nlohmann::json j = lab_to_json(cfg);
    j["kind"] = kind;
    return fnv1a_hex(j.dump());
}

// Scales supply capacity and demand; everything else is untouched.
inline ScenarioConfig build_scenario(ScenarioConfig base, double capacity_mult,
                                     double demand_mult) {
    if (capacity_mult <= 0.0 || demand_mult <= 0.0) {
        throw std::invalid_argument("scenario multipliers must be positive");
    }
    base.jam_accumulation *= capacity_mult;
    base.population =
        static_cast<int>(std::lround(base.population * demand_mult));
    return base;
}

// Deterministic policy evaluation: one episode acting at the policy mean.
// Returns the simulated days the policy controlled (day 1..horizon); the
// applied tariff adjustments land in `actions_out` when provided.
inline std::vector<DayOutcome> evaluate_policy(
    const ppo::Mlp& net, const ScenarioConfig& scenario,
    const mdp::EpisodeConfig& episode, std::uint64_t seed,
    std::vector<std::vector<double>>* actions_out = nullptr) {
    mdp::TollEnv env(scenario, episode);
    if (env.state_dim() != net.input_dim || env.action_dim() != net.action_dim) {
        throw std::runtime_error(
            "policy/environment shape mismatch: policy expects state " +
            std::to_string(net.input_dim) + " / action " + std::to_string(net.action_dim) +
            ", environment provides state " + std::to_string(env.state_dim()) +
            " / action " + std::to_string(env.action_dim()));
    }
    std::vector<double> state = env.reset(seed);
    std::vector<DayOutcome> trace;
    trace.reserve(static_cast<std::size_t>(episode.horizon));
    while (!env.done()) {
        const ppo::MlpOut o = ppo::forward(net, state);
        if (actions_out != nullptr) actions_out->push_back(o.mean);
        auto r = env.step(o.mean);
        trace.push_back(r.outcome);
        state = r.state;
    }
    return trace;
}

inline const std::vector<std::string> kMetricsColumns = {
    "kind",    "config_hash", "seed",     "aitt",        "car_aitt",
    "price",   "pt_share_pct", "welfare", "toll_m",      "toll_mu",
    "toll_sigma", "net_revenue", "oscillation", "window", "n_seeds"};

inline void write_metrics_rows(CsvWriter& csv, const std::string& kind,
                               const std::string& hash,
                               const std::vector<std::vector<DayOutcome>>& traces,
                               const std::vector<std::uint64_t>& seeds, int window,
                               bool tolled) {
    for (std::size_t s = 0; s < traces.size(); ++s) {
        const MetricsReport m = compute_metrics({traces[s]}, window, tolled);
        csv.write_row({kind, hash, std::to_string(seeds[s]), fmt(m.aitt), fmt(m.car_aitt),
                       fmt(m.price), fmt(m.pt_share_pct), fmt(m.welfare), fmt(m.toll_m),
                       fmt(m.toll_mu), fmt(m.toll_sigma), fmt(m.net_revenue),
                       fmt(m.oscillation), std::to_string(m.window),
                       std::to_string(m.n_seeds)});
    }
    const MetricsReport m = compute_metrics(traces, window, tolled);
    csv.write_row({kind, hash, "mean", fmt(m.aitt), fmt(m.car_aitt), fmt(m.price),
                   fmt(m.pt_share_pct), fmt(m.welfare), fmt(m.toll_m), fmt(m.toll_mu),
                   fmt(m.toll_sigma), fmt(m.net_revenue), fmt(m.oscillation),
                   std::to_string(m.window), std::to_string(m.n_seeds)});
}

// `actions` may be empty (no controller) or hold one action per day per seed.
inline void write_traces_ndjson(
    const std::string& path, const std::vector<std::vector<DayOutcome>>& traces,
    const std::vector<std::uint64_t>& seeds, const ScenarioConfig& scenario,
    double pt_target,
    const std::vector<std::vector<std::vector<double>>>& actions = {}) {
    NdjsonWriter out(path);
    const double tau0 = scenario.free_flow_travel_time();
    for (std::size_t s = 0; s < traces.size(); ++s) {
        for (std::size_t d = 0; d < traces[s].size(); ++d) {
            const auto& day = traces[s][d];
            nlohmann::json j = day_record(
                day, mdp::day_reward(day.aitt, day.pt_share, tau0, pt_target), seeds[s]);
            if (s < actions.size() && d < actions[s].size()) {
                j["action"] = actions[s][d];
            }
            out.write(j);
        }
    }
}

struct BaselineResult {
    MetricsReport metrics;
    std::vector<std::vector<DayOutcome>> traces;
};

// No-tolling baseline across seeds.
inline BaselineResult run_nt_experiment(const LabConfig& cfg) {
    ensure_dir(cfg.out_dir);
    const std::string hash = config_hash(cfg, "nt");
    BaselineResult r;
    for (std::uint64_t seed : cfg.seeds) {
        r.traces.push_back(bo::run_no_toll(cfg.scenario, seed, cfg.days));
    }
    CsvWriter csv(cfg.out_dir + "/nt_metrics.csv", kMetricsColumns);
    write_metrics_rows(csv, "nt", hash, r.traces, cfg.seeds, cfg.metrics_window, false);
    write_traces_ndjson(cfg.out_dir + "/nt_traces.ndjson", r.traces, cfg.seeds,
                        cfg.scenario, cfg.episode.pt_target);
    r.metrics = compute_metrics(r.traces, cfg.metrics_window, false);
    return r;
}

// Uniform random daily tariff baseline across seeds.
inline BaselineResult run_random_experiment(const LabConfig& cfg) {
    ensure_dir(cfg.out_dir);
    const std::string hash = config_hash(cfg, "random");
    BaselineResult r;
    for (std::uint64_t seed : cfg.seeds) {
        r.traces.push_back(bo::run_random_toll(cfg.scenario, seed, cfg.days,
                                               cfg.episode.fixed_center,
                                               cfg.episode.fixed_width));
    }
    CsvWriter csv(cfg.out_dir + "/random_metrics.csv", kMetricsColumns);
    write_metrics_rows(csv, "random", hash, r.traces, cfg.seeds, cfg.metrics_window, true);
    write_traces_ndjson(cfg.out_dir + "/random_traces.ndjson", r.traces, cfg.seeds,
                        cfg.scenario, cfg.episode.pt_target);
    r.metrics = compute_metrics(r.traces, cfg.metrics_window, true);
    return r;
}

struct BoExperimentResult {
    TollProfile best_toll;
    double best_objective = 0.0;
    MetricsReport metrics;
    std::vector<std::vector<DayOutcome>> traces;
    bo::BoResult search;
};

// Surrogate-optimized constant tariff: the search runs on one evaluation
// seed (common random numbers), then the best tariff is re-simulated on
// every seed for the reported metrics.
inline BoExperimentResult run_bo_experiment(const LabConfig& cfg, int dims) {
    ensure_dir(cfg.out_dir);
    const std::string hash = config_hash(cfg, "bo");
    const auto bounds = bo::toll_bounds(dims);
    const std::uint64_t eval_seed = cfg.seeds.at(0);

    auto to_toll = [&](const std::vector<double>& p) {
        TollProfile t{p[0], cfg.episode.fixed_center, cfg.episode.fixed_width};
        if (dims == 3) {
            t.center = p[1];
            t.width = p[2];
        }
        return t;
    };
    auto objective = [&](const std::vector<double>& p) {
        return bo::evaluate_objective(to_toll(p), cfg.scenario, eval_seed, cfg.days,
                                      cfg.metrics_window, cfg.episode.pt_target);
    };

    Rng rng(mix_seed(eval_seed, 0x626fULL));
    BoExperimentResult r;
    r.search = bo::run_bo(objective, bounds, cfg.bo_init, cfg.bo_iters, rng);
    r.best_toll = to_toll(r.search.best_params);
    r.best_objective = r.search.best_objective;

    CsvWriter history(cfg.out_dir + "/bo_history.csv",
                      {"config_hash", "seed", "iteration", "toll_m", "toll_mu",
                       "toll_sigma", "objective", "running_best"});
    for (const auto& rec : r.search.history) {
        const TollProfile t = to_toll(rec.params);
        history.write_row({hash, std::to_string(eval_seed), std::to_string(rec.iteration),
                           fmt(t.amplitude), fmt(t.center), fmt(t.width),
                           fmt(rec.objective), fmt(rec.running_best)});
    }

    for (std::uint64_t seed : cfg.seeds) {
        r.traces.push_back(bo::run_schedule(
            cfg.scenario, [&r](int) { return r.best_toll; }, seed, cfg.days));
    }
    CsvWriter csv(cfg.out_dir + "/bo_metrics.csv", kMetricsColumns);
    write_metrics_rows(csv, "bo", hash, r.traces, cfg.seeds, cfg.metrics_window, true);
    write_traces_ndjson(cfg.out_dir + "/bo_traces.ndjson", r.traces, cfg.seeds,
                        cfg.scenario, cfg.episode.pt_target);
    r.metrics = compute_metrics(r.traces, cfg.metrics_window, true);
    return r;
}

inline const std::vector<std::string> kCurveColumns = {
    "config_hash", "seed",    "iteration", "mean_return", "aitt_last6",
    "toll_M_mean", "kl",      "entropy",   "L_T",         "L_S"};

inline std::vector<std::string> curve_row(const std::string& hash, std::uint64_t seed,
                                          const ppo::TrainRow& row) {
    return {hash,
            std::to_string(seed),
            std::to_string(row.iteration),
            fmt(row.mean_return),
            fmt(row.aitt_last6),
            fmt(row.toll_m_mean),
            fmt(row.kl),
            fmt(row.entropy),
            fmt(row.temporal),
            fmt(row.spatial)};
}

struct TrainExperimentResult {
    std::vector<ppo::Mlp> policies;  // one per seed
    MetricsReport metrics;
    std::vector<std::vector<DayOutcome>> eval_traces;
    std::vector<std::string> checkpoint_paths;
};

// Policy-gradient training across seeds: per-seed learning curves and
// checkpoints, then deterministic evaluation for cross-seed metrics.
inline TrainExperimentResult run_train_experiment(const LabConfig& cfg,
                                                  const std::string& tag = "train") {
    ensure_dir(cfg.out_dir);
    const std::string hash = config_hash(cfg, tag);
    TrainExperimentResult r;
    std::vector<std::vector<std::vector<double>>> eval_actions;
    CsvWriter curves(cfg.out_dir + "/" + tag + "_curves.csv", kCurveColumns);
    for (std::uint64_t seed : cfg.seeds) {
        auto factory = [&cfg](int) { return mdp::TollEnv(cfg.scenario, cfg.episode); };
        ppo::TrainResult tr =
            ppo::train(factory, cfg.train, cfg.train_iters, seed, cfg.threads);
        for (const auto& row : tr.curves) curves.write_row(curve_row(hash, seed, row));
        const std::string ckpt =
            cfg.out_dir + "/" + tag + "_policy_seed" + std::to_string(seed) + ".ckpt";
        ppo::save_checkpoint(tr.net, ckpt, hash);
        r.checkpoint_paths.push_back(ckpt);
        eval_actions.emplace_back();
        r.eval_traces.push_back(evaluate_policy(tr.net, cfg.scenario, cfg.episode,
                                                mix_seed(seed, 0x6576ULL),
                                                &eval_actions.back()));
        r.policies.push_back(std::move(tr.net));
    }
    CsvWriter csv(cfg.out_dir + "/" + tag + "_metrics.csv", kMetricsColumns);
    write_metrics_rows(csv, tag, hash, r.eval_traces, cfg.seeds, cfg.metrics_window, true);
    write_traces_ndjson(cfg.out_dir + "/" + tag + "_eval_traces.ndjson", r.eval_traces,
                        cfg.seeds, cfg.scenario, cfg.episode.pt_target, eval_actions);
    r.metrics = compute_metrics(r.eval_traces, cfg.metrics_window, true);
    return r;
}

struct TransferExperimentResult {
    MetricsReport transferred;
    MetricsReport scratch;
    double transferred_mean_reward = 0.0;
    double scratch_mean_reward = 0.0;
};

inline double window_mean_reward(const std::vector<std::vector<DayOutcome>>& traces,
                                 const ScenarioConfig& scenario, double pt_target,
                                 int window) {
    const double tau0 = scenario.free_flow_travel_time();
    double sum = 0.0;
    for (const auto& trace : traces) {
        for (std::size_t d = trace.size() - static_cast<std::size_t>(window);
             d < trace.size(); ++d) {
            sum += mdp::day_reward(trace[d].aitt, trace[d].pt_share, tau0, pt_target);
        }
    }
    return sum / (static_cast<double>(traces.size()) * window);
}

// Evaluates policies trained elsewhere on a scaled scenario, against
// policies trained from scratch on that scenario, with full day series for
// both. `trained` holds one policy per seed (from the source scenario).
inline TransferExperimentResult run_transfer_experiment(
    const LabConfig& target_cfg, const std::vector<ppo::Mlp>& trained,
    const std::string& tag = "transfer") {
    ensure_dir(target_cfg.out_dir);
    const std::string hash = config_hash(target_cfg, tag);

    std::vector<std::vector<DayOutcome>> transferred_traces;
    for (std::size_t s = 0; s < target_cfg.seeds.size(); ++s) {
        const ppo::Mlp& net = trained[s % trained.size()];
        transferred_traces.push_back(
            evaluate_policy(net, target_cfg.scenario, target_cfg.episode,
                            mix_seed(target_cfg.seeds[s], 0x6576ULL)));
    }

    LabConfig scratch_cfg = target_cfg;
    scratch_cfg.out_dir = target_cfg.out_dir + "/" + tag + "_scratch";
    TrainExperimentResult scratch = run_train_experiment(scratch_cfg, "scratch");

    CsvWriter series(target_cfg.out_dir + "/" + tag + "_series.csv",
                     {"config_hash", "policy", "seed", "day", "reward", "aitt", "toll_m",
                      "toll_mu", "toll_sigma", "price", "pt_share"});
    const double tau0 = target_cfg.scenario.free_flow_travel_time();
    auto emit_series = [&](const std::string& policy,
                           const std::vector<std::vector<DayOutcome>>& traces) {
        for (std::size_t s = 0; s < traces.size(); ++s) {
            for (const auto& day : traces[s]) {
                series.write_row(
                    {hash, policy, std::to_string(target_cfg.seeds[s]),
                     std::to_string(day.day),
                     fmt(mdp::day_reward(day.aitt, day.pt_share, tau0,
                                         target_cfg.episode.pt_target)),
                     fmt(day.aitt), fmt(day.toll.amplitude), fmt(day.toll.center),
                     fmt(day.toll.width), fmt(day.price), fmt(day.pt_share)});
            }
        }
    };
    emit_series("transferred", transferred_traces);
    emit_series("scratch", scratch.eval_traces);

    CsvWriter csv(target_cfg.out_dir + "/" + tag + "_metrics.csv", kMetricsColumns);
    write_metrics_rows(csv, tag + ":transferred", hash, transferred_traces,
                       target_cfg.seeds, target_cfg.metrics_window, true);
    write_metrics_rows(csv, tag + ":scratch", hash, scratch.eval_traces, target_cfg.seeds,
                       target_cfg.metrics_window, true);

    TransferExperimentResult r;
    r.transferred =
        compute_metrics(transferred_traces, target_cfg.metrics_window, true);
    r.scratch = scratch.metrics;
    r.transferred_mean_reward =
        window_mean_reward(transferred_traces, target_cfg.scenario,
                           target_cfg.episode.pt_target, target_cfg.metrics_window);
    r.scratch_mean_reward =
        window_mean_reward(scratch.eval_traces, target_cfg.scenario,
                           target_cfg.episode.pt_target, target_cfg.metrics_window);
    return r;
}

struct SweepCell {
    std::string name;
    ppo::TrainConfig train;
};

// Trains one configuration per cell per seed and emits tagged curves plus
// final metrics for side-by-side comparison.
inline std::vector<std::pair<std::string, MetricsReport>> run_sweep_experiment(
    const LabConfig& base, const std::vector<SweepCell>& cells) {
    if (cells.empty()) throw std::invalid_argument("sweep grid is empty");
    ensure_dir(base.out_dir);
    const std::string hash = config_hash(base, "sweep");
    CsvWriter curves(base.out_dir + "/sweep_curves.csv",
                     {"config_hash", "cell", "seed", "iteration", "mean_return",
                      "aitt_last6", "toll_M_mean", "kl", "entropy", "L_T", "L_S"});
    CsvWriter metrics_csv(base.out_dir + "/sweep_metrics.csv",
                          {"config_hash", "cell", "seed", "aitt", "car_aitt", "price",
                           "pt_share_pct", "welfare", "toll_m", "toll_mu", "toll_sigma",
                           "net_revenue", "oscillation", "window", "n_seeds"});

    std::vector<std::pair<std::string, MetricsReport>> results;
    for (const auto& cell : cells) {
        LabConfig cfg = base;
        cfg.train = cell.train;
        std::vector<std::vector<DayOutcome>> eval_traces;
        for (std::uint64_t seed : cfg.seeds) {
            auto factory = [&cfg](int) { return mdp::TollEnv(cfg.scenario, cfg.episode); };
            ppo::TrainResult tr =
                ppo::train(factory, cfg.train, cfg.train_iters, seed, cfg.threads);
            for (const auto& row : tr.curves) {
                auto cells_row = curve_row(hash, seed, row);
                cells_row.insert(cells_row.begin() + 1, cell.name);
                curves.write_row(cells_row);
            }
            eval_traces.push_back(evaluate_policy(tr.net, cfg.scenario, cfg.episode,
                                                  mix_seed(seed, 0x6576ULL)));
        }
        for (std::size_t s = 0; s < eval_traces.size(); ++s) {
            const MetricsReport m =
                compute_metrics({eval_traces[s]}, cfg.metrics_window, true);
            metrics_csv.write_row({hash, cell.name, std::to_string(cfg.seeds[s]),
                                   fmt(m.aitt), fmt(m.car_aitt), fmt(m.price),
                                   fmt(m.pt_share_pct), fmt(m.welfare), fmt(m.toll_m),
                                   fmt(m.toll_mu), fmt(m.toll_sigma), fmt(m.net_revenue),
                                   fmt(m.oscillation), std::to_string(m.window),
                                   std::to_string(m.n_seeds)});
        }
        const MetricsReport m = compute_metrics(eval_traces, cfg.metrics_window, true);
        metrics_csv.write_row({hash, cell.name, "mean", fmt(m.aitt), fmt(m.car_aitt),
                               fmt(m.price), fmt(m.pt_share_pct), fmt(m.welfare),
                               fmt(m.toll_m), fmt(m.toll_mu), fmt(m.toll_sigma),
                               fmt(m.net_revenue), fmt(m.oscillation),
                               std::to_string(m.window), std::to_string(m.n_seeds)});
        results.emplace_back(cell.name, m);
    }
    return results;
}

}  // namespace tcs::lab
