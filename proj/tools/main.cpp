/// @file main.cpp
/// @brief rcns command line driver.
///
/// Runs a configured simulation or one of the studies:
///   rcns --config run.cfg --out results
///   rcns --config run.cfg --override grid.N=1600 --override time.t_final=0.25
///   rcns --config run.cfg --study convergence
///   rcns --config shallow.cfg --study shallow-eq
///   rcns --config run.cfg --study characteristics

#include "rcns/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"radial compressible Navier-Stokes simulator with density-linear viscosity"};

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::string study;
    bool print_keys = false;

    app.add_option("--config", config_path, "configuration file (key = value lines)");
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("--override", overrides, "KEY=VALUE configuration override (repeatable)");
    app.add_option("--study", study,
                   "run a study instead of a single simulation: "
                   "convergence | shallow-eq | characteristics")
        ->check(CLI::IsMember({"convergence", "shallow-eq", "characteristics"}));
    app.add_flag("--keys", print_keys, "print the configuration key reference and exit");

    CLI11_PARSE(app, argc, argv);

    if (print_keys) {
        std::cout << rcns::config_reference();
        return 0;
    }

    rcns::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = rcns::load_config_file(config_path);
        for (const auto& ov : overrides) rcns::apply_override(cfg, ov);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
    } catch (const rcns::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return rcns::kExitConfig;
    }

    if (study == "convergence") {
        auto report = rcns::convergence_study(cfg, cfg.study_levels);
        if (report.exit_code != rcns::kExitOk) {
            std::cerr << report.message << "\n";
            return report.exit_code;
        }
        std::cout << "convergence study (" << report.levels.size() << " levels)\n";
        for (std::size_t k = 0; k < report.levels.size(); ++k) {
            const auto& lv = report.levels[k];
            std::printf("  level %zu: N = %d  diff_rho = %.3e  diff_u = %.3e  "
                        "energy_res = %.3e  bd_res = %.3e\n",
                        k, lv.N, lv.diff_rho, lv.diff_u, lv.energy_residual_sum,
                        lv.bd_residual_sum);
        }
        if (report.exact) {
            std::cout << "  successive levels coincide (steady state)\n";
        } else {
            for (std::size_t k = 0; k < report.order_rho.size(); ++k)
                std::printf("  observed order (level %zu -> %zu): rho %.2f  u %.2f\n", k,
                            k + 1, report.order_rho[k], report.order_u[k]);
        }
        return 0;
    }

    if (study == "shallow-eq") {
        if (!cfg.variant) {
            std::cerr << "--study shallow-eq requires model.variant to be set\n";
            return rcns::kExitConfig;
        }
        auto report = rcns::shallow_equivalence(*cfg.variant, cfg);
        if (report.identical) {
            std::cout << "shallow-water and general diagnostics series are bitwise identical\n";
            return 0;
        }
        std::cerr << "diagnostics series differ\n" << report.detail << "\n";
        return report.exit_code == rcns::kExitOk ? rcns::kExitInvariant : report.exit_code;
    }

    if (study == "characteristics") {
        auto report = rcns::characteristics_study(cfg);
        if (report.exit_code != rcns::kExitOk) return report.exit_code;
        std::printf("characteristic cross-oracle: gap %.3e -> %.3e, ratio %.2f under "
                    "(dt, dr) halving\n",
                    report.gap_coarse, report.gap_fine, report.ratio);
        return 0;
    }

    rcns::RunResult result = rcns::run(cfg);
    if (result.exit_code != rcns::kExitOk) {
        std::cerr << result.message << "\n";
    } else {
        std::cout << "run complete, outputs in " << cfg.out_dir << "\n";
    }
    return result.exit_code;
}
