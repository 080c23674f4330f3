// toll-lab: experiment driver for the day-to-day tradable-credit tolling
// laboratory. Subcommands run the no-toll and random baselines, the
// surrogate-optimized constant tariff, policy training, transfer evaluation,
// and hyperparameter/regularization sweeps, emitting CSV and NDJSON results.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tcs/exp/experiments.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::vector<std::uint64_t> seeds;
    std::string out_dir = "out";
    std::string scale = "desk";
    int action_dim = 0;  // 0: leave as configured
    std::string caps;
    double capacity_mult = 1.0;
    double demand_mult = 1.0;
    std::vector<std::string> checkpoints;
    int iters = 0;
    int bo_init = 0;
    int bo_iters = 0;
    int days = 0;
    int threads = 0;
    std::string sweep_kind = "caps";
};

void add_common_options(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--config", opt.config_path, "JSON config file (see docs/)");
    cmd->add_option("--seeds", opt.seeds, "run seeds")->delimiter(',');
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--scale", opt.scale, "scenario profile: desk or paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    cmd->add_option("--action-dim", opt.action_dim, "tariff action dimension: 1 or 3")
        ->check(CLI::IsMember({1, 3}));
    cmd->add_option("--caps", opt.caps,
                    "action smoothness mode: none|t_l1|t_l2|s_l1|s_l2");
    cmd->add_option("--capacity-mult", opt.capacity_mult, "capacity multiplier");
    cmd->add_option("--demand-mult", opt.demand_mult, "demand multiplier");
    cmd->add_option("--iters", opt.iters, "training iterations");
    cmd->add_option("--bo-init", opt.bo_init, "initial design size");
    cmd->add_option("--bo-iters", opt.bo_iters, "surrogate search iterations");
    cmd->add_option("--days", opt.days, "days per run / episode horizon");
    cmd->add_option("--threads", opt.threads, "worker threads (0 = auto)");
}

tcs::lab::LabConfig build_config(const CliOptions& opt) {
    tcs::lab::LabConfig cfg;
    cfg.scenario =
        opt.scale == "paper" ? tcs::paper_scale_scenario() : tcs::desk_scale_scenario();
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw std::runtime_error("cannot read config " + opt.config_path);
        nlohmann::json j;
        in >> j;
        cfg = tcs::lab::lab_from_json(j, std::move(cfg));
    }
    if (!opt.seeds.empty()) cfg.seeds = opt.seeds;
    if (opt.action_dim != 0) cfg.set_action_dim(opt.action_dim);
    if (!opt.caps.empty()) cfg.train.caps_mode = tcs::ppo::caps_mode_from_name(opt.caps);
    if (opt.iters > 0) cfg.train_iters = opt.iters;
    if (opt.bo_init > 0) cfg.bo_init = opt.bo_init;
    if (opt.bo_iters > 0) cfg.bo_iters = opt.bo_iters;
    if (opt.days > 0) {
        cfg.days = opt.days;
        cfg.episode.horizon = opt.days;
        cfg.train.n_steps = opt.days;
    }
    cfg.threads = opt.threads;
    cfg.out_dir = opt.out_dir;
    cfg.scenario = tcs::lab::build_scenario(cfg.scenario, opt.capacity_mult,
                                            opt.demand_mult);
    cfg.scenario.validate();
    cfg.episode.validate();
    cfg.train.validate();
    return cfg;
}

void print_metrics(const std::string& label, const tcs::lab::MetricsReport& m) {
    std::cout << label << ": aitt=" << tcs::lab::fmt(m.aitt)
              << " car_aitt=" << tcs::lab::fmt(m.car_aitt)
              << " price=" << tcs::lab::fmt(m.price)
              << " pt_share_pct=" << tcs::lab::fmt(m.pt_share_pct)
              << " welfare=" << tcs::lab::fmt(m.welfare)
              << " toll_m=" << tcs::lab::fmt(m.toll_m)
              << " oscillation=" << tcs::lab::fmt(m.oscillation) << "\n";
}

std::vector<tcs::lab::SweepCell> build_sweep_cells(const tcs::lab::LabConfig& cfg,
                                                   const std::string& kind) {
    using tcs::ppo::CapsMode;
    std::vector<tcs::lab::SweepCell> cells;
    if (kind == "batch") {
        for (int batch : {480, 960, 1920}) {
            auto train = cfg.train;
            train.batch_size = batch;
            cells.push_back({"batch" + std::to_string(batch), train});
        }
    } else if (kind == "epochs") {
        for (int epochs : {16, 32}) {
            auto train = cfg.train;
            train.batch_size = 960;
            train.n_epoch = epochs;
            cells.push_back({"epochs" + std::to_string(epochs), train});
        }
    } else if (kind == "caps") {
        for (CapsMode mode : {CapsMode::kNone, CapsMode::kTemporalL1, CapsMode::kTemporalL2,
                              CapsMode::kSpatialL1, CapsMode::kSpatialL2}) {
            auto train = cfg.train;
            train.batch_size = 480;
            train.n_epoch = 16;
            train.caps_mode = mode;
            cells.push_back({tcs::ppo::caps_mode_name(mode), train});
        }
    } else {
        throw std::runtime_error("unknown sweep kind: " + kind);
    }
    return cells;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"day-to-day tradable-credit tolling laboratory"};
    app.require_subcommand(1);

    CliOptions opt;
    CLI::App* nt = app.add_subcommand("nt", "no-tolling baseline");
    CLI::App* random_cmd = app.add_subcommand("random", "random-tariff baseline");
    CLI::App* bo_cmd = app.add_subcommand("bo", "surrogate-optimized constant tariff");
    CLI::App* train_cmd = app.add_subcommand("train", "policy training");
    CLI::App* transfer_cmd =
        app.add_subcommand("transfer", "evaluate a trained policy on a scaled scenario");
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "hyperparameter sweep");
    for (CLI::App* cmd : {nt, random_cmd, bo_cmd, train_cmd, transfer_cmd, sweep_cmd}) {
        add_common_options(cmd, opt);
    }
    transfer_cmd->add_option("--checkpoint", opt.checkpoints,
                             "trained policy checkpoint(s), one per seed or one shared")
        ->required();
    sweep_cmd->add_option("--sweep", opt.sweep_kind, "grid: batch|epochs|caps")
        ->check(CLI::IsMember({"batch", "epochs", "caps"}));

    CLI11_PARSE(app, argc, argv);

    try {
        tcs::lab::LabConfig cfg = build_config(opt);

        if (nt->parsed()) {
            auto r = tcs::lab::run_nt_experiment(cfg);
            print_metrics("nt", r.metrics);
        } else if (random_cmd->parsed()) {
            auto r = tcs::lab::run_random_experiment(cfg);
            print_metrics("random", r.metrics);
        } else if (bo_cmd->parsed()) {
            auto r = tcs::lab::run_bo_experiment(
                cfg, cfg.episode.action_dim == 3 ? 3 : 1);
            std::cout << "best tariff: m=" << tcs::lab::fmt(r.best_toll.amplitude)
                      << " mu=" << tcs::lab::fmt(r.best_toll.center)
                      << " sigma=" << tcs::lab::fmt(r.best_toll.width)
                      << " objective=" << tcs::lab::fmt(r.best_objective) << "\n";
            print_metrics("bo", r.metrics);
        } else if (train_cmd->parsed()) {
            auto r = tcs::lab::run_train_experiment(cfg);
            print_metrics("train", r.metrics);
            for (const auto& p : r.checkpoint_paths) {
                std::cout << "checkpoint: " << p << "\n";
            }
        } else if (transfer_cmd->parsed()) {
            std::vector<tcs::ppo::Mlp> nets;
            for (const auto& path : opt.checkpoints) {
                nets.push_back(tcs::ppo::load_checkpoint(path).net);
            }
            auto r = tcs::lab::run_transfer_experiment(cfg, nets);
            print_metrics("transferred", r.transferred);
            print_metrics("scratch", r.scratch);
            std::cout << "mean reward (last " << cfg.metrics_window
                      << " days): transferred=" << tcs::lab::fmt(r.transferred_mean_reward)
                      << " scratch=" << tcs::lab::fmt(r.scratch_mean_reward) << "\n";
        } else if (sweep_cmd->parsed()) {
            auto results =
                tcs::lab::run_sweep_experiment(cfg, build_sweep_cells(cfg, opt.sweep_kind));
            for (const auto& [name, metrics] : results) print_metrics(name, metrics);
        }
        std::cout << "results in " << cfg.out_dir << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
