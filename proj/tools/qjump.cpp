// qjump command-line front end: simulation, analysis, sweeps, phase diagrams,
// distribution fits and noise dumps, all driven by flat key = value configs.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qjump/commands.hpp"
#include "qjump/config.hpp"
#include "qjump/csv.hpp"
#include "qjump/version.hpp"

namespace {

qjump::RunConfig load_config(const std::string& path, std::int64_t seed_override) {
    qjump::RunConfig cfg = qjump::parse_config(qjump::read_file(path));
    if (seed_override >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed_override);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(qjump::version_string) +
                 " - collective-jump simulator and statistics toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::int64_t seed_override = -1;
    unsigned threads = 1;

    auto add_common = [&](CLI::App* cmd, bool with_threads) {
        cmd->add_option("--config", config_path, "run configuration file")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed_override, "override base_seed");
        if (with_threads)
            cmd->add_option("--threads", threads,
                            "worker threads (affects speed only, never results)");
    };

    auto* simulate = app.add_subcommand("simulate", "integrate a trajectory ensemble");
    add_common(simulate, true);

    auto* analyze =
        app.add_subcommand("analyze", "extract jumps, interval histogram and contrast");
    std::vector<std::string> traj_files;
    add_common(analyze, false);
    analyze->add_option("trajectories", traj_files, "trajectory CSV files")->required();

    auto* sweep = app.add_subcommand("sweep", "simulate + analyze over a parameter grid");
    add_common(sweep, true);

    auto* phase = app.add_subcommand("phase-diagram", "stable-root counts over (Delta, Omega)");
    add_common(phase, false);

    auto* fit_cmd = app.add_subcommand("fit", "fit a distribution model to a histogram");
    std::string hist_path, fit_model = "two_state";
    int starts = 8;
    std::int64_t fit_seed = 0;
    bool poisson = false;
    fit_cmd->add_option("--histogram", hist_path, "histogram CSV")->required();
    fit_cmd->add_option("--model", fit_model,
                        "exponential | damped_sine | gaussian_peak | two_state");
    fit_cmd->add_option("--out", out_dir, "output directory");
    fit_cmd->add_option("--starts", starts, "multi-start count");
    fit_cmd->add_option("--seed", fit_seed, "start-jitter seed");
    fit_cmd->add_flag("--poisson-weighted", poisson, "weight residuals by 1/max(count,1)");

    auto* noise = app.add_subcommand("noise-dump", "dump the trajectory-0 noise realization");
    add_common(noise, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            auto cfg = load_config(config_path, seed_override);
            auto res = qjump::cmd_simulate(cfg, out_dir, {threads});
            std::cout << res.trajectory_files.size() << " trajectories -> " << out_dir
                      << "\nmanifest: " << res.manifest_path.string() << '\n';
        } else if (*analyze) {
            auto cfg = load_config(config_path, seed_override);
            std::vector<qjump::fs::path> files(traj_files.begin(), traj_files.end());
            auto res = qjump::cmd_analyze(files, cfg, out_dir);
            std::cout << qjump::analyze_summary_text(res, cfg.analysis);
            if (res.status == "no_jumps") {
                std::cerr << "qjump: no jumps detected\n";
                return static_cast<int>(qjump::ErrorCategory::analysis);
            }
        } else if (*sweep) {
            auto cfg = load_config(config_path, seed_override);
            auto res = qjump::cmd_sweep(cfg, out_dir, {threads});
            std::cout << "sweep of " << res.param << ": " << res.points.size()
                      << " points -> " << res.table_path.string() << '\n';
        } else if (*phase) {
            auto cfg = load_config(config_path, seed_override);
            auto pd = qjump::cmd_phase_diagram(cfg, out_dir);
            std::cout << "phase diagram: " << pd.deltas.size() << " x " << pd.omegas.size()
                      << " cells -> " << (qjump::fs::path(out_dir) / "phase_diagram.csv").string()
                      << '\n';
        } else if (*fit_cmd) {
            auto kind = qjump::fit_kind_from_name(fit_model);
            auto fr = qjump::cmd_fit(hist_path, kind, starts,
                                     static_cast<std::uint64_t>(fit_seed), poisson, out_dir);
            std::cout << qjump::fit_result_text(fr);
        } else if (*noise) {
            auto cfg = load_config(config_path, seed_override);
            auto p = qjump::cmd_noise_dump(cfg, out_dir);
            std::cout << "noise signal -> " << p.string() << '\n';
        }
    } catch (const qjump::Error& e) {
        std::cerr << "qjump: " << e.what() << '\n';
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "qjump: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
