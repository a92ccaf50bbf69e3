#include "plqr/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>

#include "plqr/config.hpp"
#include "plqr/log.hpp"
#include "plqr/serialize.hpp"
#include "plqr/svg_plot.hpp"

namespace plqr {

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string config_path;
    std::string schedule_path;
    std::string trajectory_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_override;
    std::optional<std::string> mode_override;
    int vi_periods = 0;
};

void ensure_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
}

int cmd_design(const CommonArgs& args) {
    const RunConfig config = RunConfig::load(args.config_path);
    ensure_out_dir(args.out_dir);

    const auto t0 = std::chrono::steady_clock::now();
    const PeriodicPlant plant = config.build_plant();
    RiccatiDiagnostics diag;
    GainSchedule schedule = periodic_riccati(plant, {}, &diag);
    schedule.x_bar = config.x_bar();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const GramianInfo gramian = controllability_gramian_rank(plant);

    const fs::path schedule_path = fs::path(args.out_dir) / "schedule.json";
    write_json_file(schedule_path, schedule_to_json(schedule));

    nlohmann::json report;
    report["solver"] = config.constant_field() ? "constant-field fast path (p = 1, DARE)"
                                               : "periodic Riccati (p = " +
                                                     std::to_string(plant.p) + ")";
    report["elapsed_s"] = elapsed;
    report["max_residual"] = diag.max_residual;
    report["subspace_residual"] = diag.subspace_residual;
    report["refine_sweeps"] = diag.refine_sweeps;
    report["fallback_count"] = diag.fallback_count;
    report["monodromy_spectral_radius"] = diag.monodromy_spectral_radius;
    report["gramian_rank"] = gramian.rank;
    report["gramian_condition"] = gramian.condition;
    report["sample_period_s"] = plant.ts;
    const fs::path report_path = fs::path(args.out_dir) / "design_report.json";
    write_json_file(report_path, report);

    log::info("design: wrote " + schedule_path.string());
    std::cout << "design ok: " << report["solver"].get<std::string>()
              << ", residual " << diag.max_residual << ", monodromy rho "
              << diag.monodromy_spectral_radius << ", gramian rank " << gramian.rank << ", "
              << elapsed << " s\n";
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    RunConfig config = RunConfig::load(args.config_path);
    if (args.seed_override) config.sim.seed = *args.seed_override;
    if (args.mode_override) {
        if (*args.mode_override == "linear") {
            config.sim.mode = SimMode::linear;
        } else if (*args.mode_override == "nonlinear") {
            config.sim.mode = SimMode::nonlinear;
        } else {
            throw ValidationError("--mode must be 'linear' or 'nonlinear'");
        }
    }
    const GainSchedule schedule = schedule_from_json(read_json_file(args.schedule_path));
    const PeriodicPlant plant = config.build_plant();
    ensure_out_dir(args.out_dir);

    const Trajectory traj =
        momentum_bias_run(plant, schedule, config.sim, config.spacecraft, config.orbit);
    const fs::path csv_path = fs::path(args.out_dir) / "trajectory.csv";
    write_trajectory_csv(csv_path, traj);
    std::cout << "simulate ok: " << traj.samples.size() << " rows -> " << csv_path.string()
              << "\n";
    return 0;
}

int cmd_plot(const CommonArgs& args) {
    const Trajectory traj = read_trajectory_csv(args.trajectory_path);
    ensure_out_dir(args.out_dir);
    write_trajectory_charts(traj, args.out_dir);
    std::cout << "plot ok: rates.svg wheels.svg attitude.svg in " << args.out_dir << "\n";
    return 0;
}

struct VerifyCheck {
    std::string name;
    bool passed;
    std::string detail;
};

int cmd_verify(const CommonArgs& args) {
    const RunConfig config = RunConfig::load(args.config_path);
    const GainSchedule schedule = schedule_from_json(read_json_file(args.schedule_path));
    const PeriodicPlant plant = config.build_plant();

    std::vector<VerifyCheck> checks;
    auto record = [&](const std::string& name, bool ok, const std::string& detail) {
        checks.push_back({name, ok, detail});
    };

    if (schedule.p != plant.p && schedule.p != 1) {
        record("period-compatibility", false,
               "schedule p = " + std::to_string(schedule.p) + ", plant p = " +
                   std::to_string(plant.p));
    } else if (schedule.ts > 0.0 && std::abs(schedule.ts - plant.ts) > 1e-9 * plant.ts) {
        record("period-compatibility", false, "sample period mismatch");
    } else {
        record("period-compatibility", true, "");

        double worst_sym = 0.0;
        double worst_psd = 0.0;
        for (const auto& pk : schedule.riccati) {
            worst_sym = std::max(worst_sym,
                                 (pk - pk.transpose()).norm() / std::max(1.0, pk.norm()));
            const auto eigs = matkit::symmetric_eigenvalues(pk);
            worst_psd = std::min(worst_psd, eigs.front() / std::max(1.0, pk.norm()));
        }
        record("symmetry", worst_sym <= 1e-9, "max asymmetry " + std::to_string(worst_sym));
        record("positive-semidefinite", worst_psd >= -1e-9,
               "min scaled eigenvalue " + std::to_string(worst_psd));

        const double residual = riccati_residual(plant, schedule);
        record("riccati-residual", residual <= 1e-6, "residual " + std::to_string(residual));

        double worst_gain = 0.0;
        for (int k = 0; k < plant.p; ++k) {
            const Eigen::MatrixXd btp = plant.b_at(k).transpose() * schedule.riccati_at(k + 1);
            const Eigen::MatrixXd expect =
                matkit::solve_linear(plant.r + btp * plant.b_at(k), btp * plant.a);
            worst_gain = std::max(worst_gain, (schedule.gain_at(k) - expect).norm() /
                                                  std::max(1.0, expect.norm()));
        }
        record("gain-consistency", worst_gain <= 1e-8,
               "max gain deviation " + std::to_string(worst_gain));

        const double rho = matkit::spectral_radius(closed_loop_monodromy(plant, schedule));
        record("monodromy-stability", rho < 1.0, "spectral radius " + std::to_string(rho));

        if (args.vi_periods > 0) {
            std::vector<Eigen::MatrixXd> orbit(static_cast<size_t>(plant.p));
            Eigen::MatrixXd pm = plant.q;
            for (int sweep = 0; sweep < args.vi_periods; ++sweep) {
                for (int k = plant.p - 1; k >= 0; --k) {
                    const Eigen::MatrixXd btp = plant.b_at(k).transpose() * pm;
                    const Eigen::MatrixXd gain =
                        matkit::solve_linear(plant.r + btp * plant.b_at(k), btp * plant.a);
                    pm = plant.q + plant.a.transpose() * pm * plant.a -
                         (btp * plant.a).transpose() * gain;
                    pm = 0.5 * (pm + pm.transpose());
                    orbit[static_cast<size_t>(k)] = pm;
                }
            }
            double worst_vi = 0.0;
            for (int k = 0; k < plant.p; ++k) {
                worst_vi = std::max(worst_vi,
                                    (orbit[static_cast<size_t>(k)] - schedule.riccati_at(k)).norm() /
                                        std::max(1.0, schedule.riccati_at(k).norm()));
            }
            record("value-iteration", worst_vi <= 1e-6,
                   "max deviation " + std::to_string(worst_vi) + " after " +
                       std::to_string(args.vi_periods) + " periods");
        }
    }

    bool all_ok = true;
    for (const auto& check : checks) {
        all_ok = all_ok && check.passed;
        std::cout << (check.passed ? "PASS " : "FAIL ") << check.name;
        if (!check.detail.empty()) std::cout << " (" << check.detail << ")";
        std::cout << "\n";
    }
    std::cout << (all_ok ? "verify ok\n" : "verify FAILED\n");
    return all_ok ? 0 : 3;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Periodic LQR design and simulation for combined spacecraft attitude control "
                 "and reaction-wheel desaturation"};
    app.require_subcommand(1);

    CommonArgs common;

    CLI::App* design = app.add_subcommand("design", "Compute a periodic gain schedule");
    design->add_option("--config", common.config_path, "Run configuration JSON")->required();
    design->add_option("--out", common.out_dir, "Output directory");

    CLI::App* simulate = app.add_subcommand("simulate", "Run the closed loop");
    simulate->add_option("--config", common.config_path, "Run configuration JSON")->required();
    simulate->add_option("--schedule", common.schedule_path, "Gain schedule JSON")->required();
    simulate->add_option("--out", common.out_dir, "Output directory");
    simulate->add_option("--seed", common.seed_override, "Override the IC randomization seed");
    simulate->add_option("--mode", common.mode_override, "Override the mode: linear|nonlinear");

    CLI::App* plot = app.add_subcommand("plot", "Render trajectory charts");
    plot->add_option("--trajectory", common.trajectory_path, "Trajectory CSV")->required();
    plot->add_option("--out", common.out_dir, "Output directory");

    CLI::App* verify = app.add_subcommand("verify", "Re-check a stored schedule");
    verify->add_option("--config", common.config_path, "Run configuration JSON")->required();
    verify->add_option("--schedule", common.schedule_path, "Gain schedule JSON")->required();
    verify->add_option("--vi-periods", common.vi_periods,
                       "Cross-check against backward value iteration over N periods");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& err) {
        return app.exit(err);
    }

    try {
        if (design->parsed()) return cmd_design(common);
        if (simulate->parsed()) return cmd_simulate(common);
        if (plot->parsed()) return cmd_plot(common);
        if (verify->parsed()) return cmd_verify(common);
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return static_cast<int>(err.error_class());
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace plqr
