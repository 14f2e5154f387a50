#include "rcns/config.hpp"
#include "rcns/runner.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rcns;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / "rcns_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

RunConfig small_config(const std::string& out_name) {
    RunConfig cfg;
    cfg.grid_N = 200;
    cfg.t_final = 0.05;
    cfg.out_dir = fresh_dir(out_name).string();
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config parsing: defaults, comments, unknown keys, overrides") {
    RunConfig cfg = parse_config_text("# comment only\n\n");
    CHECK(cfg.grid_N == 800);
    CHECK(cfg.t_final == 0.5);
    CHECK(cfg.params.gamma == 2.0);

    cfg = parse_config_text("grid.N = 400  # inline comment\nmodel.gamma = 1.8\n");
    CHECK(cfg.grid_N == 400);
    CHECK(cfg.params.gamma == 1.8);

    CHECK_THROWS_AS(parse_config_text("grid.n = 12\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("grid.N = twelve\n"), ConfigError);

    apply_override(cfg, "time.t_final=0.25");
    CHECK(cfg.t_final == 0.25);
    CHECK_THROWS_AS(apply_override(cfg, "bogus.key=1"), ConfigError);

    // model.d keeps m = d - 1 in lock step
    cfg = parse_config_text("model.d = 2\n");
    CHECK(cfg.params.m == 1);
}

TEST_CASE("config validation catches bad ranges") {
    RunConfig cfg;
    cfg.solver.cfl = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.q = 7.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.grid_N = 4;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = RunConfig{};
    cfg.init.kind = InitKind::Custom;
    CHECK_THROWS_AS(cfg.validate(), ConfigError); // custom without a table
}

TEST_CASE("run with t_final = 0 produces one record and the t = 0 snapshot") {
    RunConfig cfg = small_config("tfinal0");
    cfg.t_final = 0.0;
    cfg.characteristics_enabled = false;
    RunResult r = run(cfg);
    CHECK(r.exit_code == kExitOk);
    CHECK(r.series.size() == 1);
    CHECK(fs::exists(fs::path(cfg.out_dir) / "snapshot_0.000000.csv"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "diagnostics.csv"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "summary.txt"));
}

TEST_CASE("steady-state run passes every invariant check") {
    RunConfig cfg = small_config("steady");
    // constant-density table, no velocity
    const fs::path table = fs::path(cfg.out_dir) / "rho.csv";
    {
        std::ofstream out(table);
        out << "0.5,1.0\n25.0,1.0\n";
    }
    cfg.init.kind = InitKind::Custom;
    cfg.init.rho_file = table.string();
    cfg.init.u_amplitude = 0.0;
    cfg.t_final = 0.2;
    RunResult r = run(cfg);
    CHECK(r.exit_code == kExitOk);
    for (const auto& c : r.checks) CHECK(c.pass);
    REQUIRE(r.final_state.has_value());
    for (int i = 0; i < 200; ++i) {
        CHECK(r.final_state->rho[i] == 1.0);
        CHECK(r.final_state->u[i] == 0.0);
    }
}

TEST_CASE("default experiment run produces the full file set and passes checks") {
    RunConfig cfg = small_config("default_exp");
    cfg.t_final = 0.1;
    RunResult r = run(cfg);
    CHECK(r.exit_code == kExitOk);
    CHECK(fs::exists(fs::path(cfg.out_dir) / "diagnostics.csv"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "summary.txt"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "snapshot_0.000000.csv"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "snapshot_0.100000.csv"));
    REQUIRE(r.characteristic_gap.has_value());
    CHECK(*r.characteristic_gap < 1.0);
    const std::string summary = slurp(fs::path(cfg.out_dir) / "summary.txt");
    CHECK(summary.find("initial data validation") != std::string::npos);
    CHECK(summary.find("[pass]") != std::string::npos);
}

TEST_CASE("identical configs give bitwise-identical outputs") {
    RunConfig a = small_config("det_a");
    RunConfig b = small_config("det_b");
    a.t_final = b.t_final = 0.05;
    RunResult ra = run(a);
    RunResult rb = run(b);
    REQUIRE(ra.exit_code == kExitOk);
    REQUIRE(rb.exit_code == kExitOk);
    CHECK(slurp(fs::path(a.out_dir) / "diagnostics.csv") ==
          slurp(fs::path(b.out_dir) / "diagnostics.csv"));
    CHECK(slurp(fs::path(a.out_dir) / "snapshot_0.050000.csv") ==
          slurp(fs::path(b.out_dir) / "snapshot_0.050000.csv"));
}

TEST_CASE("config errors are reported as exit code 2") {
    RunConfig cfg = small_config("bad_cfg");
    cfg.solver.cfl = 2.0;
    RunResult r = run(cfg);
    CHECK(r.exit_code == kExitConfig);
}

TEST_CASE("step failures are reported as exit code 3 with a timestamp") {
    RunConfig cfg = small_config("blowup");
    cfg.solver.formulation = Formulation::Reformulated;
    cfg.solver.picard_max_iter = 1;
    cfg.solver.picard_tol = 1e-300;
    cfg.t_final = 0.05;
    RunResult r = run(cfg);
    CHECK(r.exit_code == kExitStepFailure);
    CHECK(r.message.find("t = ") != std::string::npos);
}

TEST_CASE("convergence study on a steady state reports exact agreement") {
    RunConfig cfg = small_config("conv_steady");
    const fs::path table = fs::path(cfg.out_dir) / "rho.csv";
    {
        std::ofstream out(table);
        out << "0.5,1.0\n25.0,1.0\n";
    }
    cfg.init.kind = InitKind::Custom;
    cfg.init.rho_file = table.string();
    cfg.init.u_amplitude = 0.0;
    cfg.grid_N = 100;
    cfg.t_final = 0.05;
    ConvergenceReport rep = convergence_study(cfg, 3);
    CHECK(rep.exit_code == kExitOk);
    CHECK(rep.exact);
    CHECK(fs::exists(fs::path(cfg.out_dir) / "orders.csv"));
}

TEST_CASE("convergence study observes order >= 1 on the dissipative run") {
    RunConfig cfg = small_config("conv_a0");
    cfg.params.A = 0.0;
    cfg.grid_N = 150;
    cfg.t_final = 0.1;
    ConvergenceReport rep = convergence_study(cfg, 3);
    REQUIRE(rep.exit_code == kExitOk);
    REQUIRE_FALSE(rep.exact);
    REQUIRE(rep.order_u.size() >= 1);
    CHECK(rep.order_u.front() >= 1.0);
    // residual sums shrink monotonically with refinement
    for (std::size_t k = 0; k + 1 < rep.levels.size(); ++k)
        CHECK(rep.levels[k + 1].energy_residual_sum < rep.levels[k].energy_residual_sum);
}

TEST_CASE("shallow-water variants reproduce the general solver bitwise") {
    for (auto v : {ShallowVariant::DivHD, ShallowVariant::Div2HD, ShallowVariant::DivHGrad}) {
        RunConfig cfg = small_config(std::string("shallow_") + to_string(v));
        cfg.t_final = 0.05;
        cfg.grid_N = 150;
        cfg.characteristics_enabled = false;
        ShallowEquivalenceReport rep = shallow_equivalence(v, cfg);
        CHECK(rep.exit_code == kExitOk);
        CHECK(rep.identical);
    }
}

#ifdef RCNS_CLI_PATH
TEST_CASE("command line driver end to end") {
    const fs::path dir = fresh_dir("cli_e2e");
    const fs::path cfg_path = dir / "run.cfg";
    {
        std::ofstream out(cfg_path);
        out << "grid.N = 150\n";
        out << "time.t_final = 0.05\n";
        out << "output.dir = " << (dir / "out").string() << "\n";
    }
    const std::string base = std::string(RCNS_CLI_PATH);
    CHECK(std::system((base + " --config " + cfg_path.string() + " > /dev/null").c_str()) == 0);
    CHECK(fs::exists(dir / "out" / "diagnostics.csv"));

    // unknown key: exit code 2
    {
        std::ofstream out(cfg_path, std::ios::app);
        out << "grid.bogus = 1\n";
    }
    const int rc = std::system((base + " --config " + cfg_path.string() +
                                " 2> /dev/null").c_str());
    CHECK(WEXITSTATUS(rc) == kExitConfig);
}
#endif
