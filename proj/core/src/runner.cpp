#include "rcns/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rcns {

namespace {

namespace fs = std::filesystem;

std::string one_line(std::string text) {
    std::string out = "config: ";
    for (char ch : text) {
        if (ch == '\n') {
            if (&ch != &text.back()) out += "; ";
        } else {
            out += ch;
        }
    }
    return out;
}

ModelParams effective_params(const RunConfig& cfg) {
    return cfg.variant ? variant_params(*cfg.variant) : cfg.params;
}

/// Collects snapshot copies at the configured time cadence.
class SnapshotObserver : public StepObserver {
public:
    SnapshotObserver(double interval, double t_final)
        : interval_(interval), t_final_(t_final) {}

    void on_record(const FluidState& s) override {
        if (states_.empty()) {
            states_.push_back(s);
            next_ = interval_ > 0.0 ? s.t + interval_ : t_final_;
            return;
        }
        const bool final_state = s.t >= t_final_ - 1e-12 * std::max(1.0, t_final_);
        if (final_state) {
            if (s.t > states_.back().t) states_.push_back(s);
            return;
        }
        if (interval_ > 0.0 && s.t >= next_ - 1e-12) {
            states_.push_back(s);
            while (next_ <= s.t + 1e-12) next_ += interval_;
        }
    }

    const std::vector<FluidState>& states() const { return states_; }

private:
    double interval_;
    double t_final_;
    double next_ = 0.0;
    std::vector<FluidState> states_;
};

std::vector<CheckOutcome> run_invariant_checks(const RunConfig& cfg,
                                               const EvolveBundle& bundle) {
    std::vector<CheckOutcome> checks;
    const auto& series = bundle.series;

    {
        CheckOutcome c{"all diagnostics finite", true, ""};
        for (const auto& r : series) {
            const double vals[] = {r.mass,   r.energy, r.energy_dissipation_rate,
                                   r.bd_entropy, r.bd_dissipation_rate, r.sup_rho,
                                   r.sup_v,  r.sup_psi, r.gronwall_rhs,
                                   r.boundary_flux_cum, r.psi_consistency};
            for (double v : vals) {
                if (!std::isfinite(v)) {
                    c.pass = false;
                    std::ostringstream os;
                    os << "non-finite diagnostic at t = " << r.t;
                    c.detail = os.str();
                }
            }
        }
        checks.push_back(std::move(c));
    }
    {
        CheckOutcome c{"no-slip boundary u(a) = u(R) = 0", true, ""};
        const auto& u = bundle.final_state.u;
        if (u.values.front() != 0.0 || u.values.back() != 0.0) {
            c.pass = false;
            c.detail = "boundary velocity is nonzero on the final state";
        }
        checks.push_back(std::move(c));
    }
    if (cfg.solver.formulation == Formulation::Conservative && !series.empty()) {
        CheckOutcome c{"mass ledger: mass(t) + outflux_cum(t) = mass(0)", true, ""};
        const double mass0 = series.front().mass;
        double worst = 0.0, t_worst = 0.0;
        for (const auto& r : series) {
            const double defect = std::abs(r.mass + r.boundary_flux_cum - mass0);
            if (defect > worst) {
                worst = defect;
                t_worst = r.t;
            }
        }
        std::ostringstream os;
        os << "worst defect " << worst << " at t = " << t_worst << " (tolerance "
           << 1e-12 * mass0 << ")";
        c.detail = os.str();
        c.pass = worst <= 1e-12 * mass0;
        checks.push_back(std::move(c));
    }
    if (!series.empty()) {
        VBoundReport vb = v_bound_check(series);
        checks.push_back({"transport bound sup|v| <= gronwall rhs + tol", vb.pass,
                          vb.to_text()});
    }
    return checks;
}

std::string snapshot_filename(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "snapshot_%.6f.csv", t);
    return buf;
}

} // namespace

void write_snapshot_csv(const FluidState& s, const RadialGrid& g, std::ostream& sink,
                        const std::string& provenance) {
    if (!provenance.empty()) sink << "# " << provenance << "\n";
    sink << "r,rho,u,phi,psi,v\n";
    char buf[32];
    auto put = [&](double x, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        sink << buf << sep;
    };
    for (int i = 0; i < g.size(); ++i) {
        put(g.node(i), ',');
        put(s.rho[i], ',');
        put(s.u[i], ',');
        put(s.phi[i], ',');
        put(s.psi[i], ',');
        put(s.v[i], '\n');
    }
}

EvolveBundle execute(const RunConfig& cfg, bool with_history) {
    EvolveBundle bundle;
    bundle.params = effective_params(cfg);
    RadialGrid grid = cfg.make_grid();
    std::optional<double> sigma;
    if (cfg.init.kind == InitKind::PowerLaw) sigma = cfg.init.sigma;

    FluidState state0 = build(cfg.init, grid, bundle.params);
    if (cfg.solver.formulation == Formulation::Reformulated)
        refresh_derived(state0, bundle.params, grid, Formulation::Reformulated);

    DiagnosticsCollector collector(bundle.params, grid, cfg.q);
    std::vector<StepObserver*> observers{&collector};
    std::optional<HistoryRecorder> recorder;
    if (with_history) {
        bundle.history.emplace(grid, bundle.params);
        recorder.emplace(*bundle.history);
        observers.push_back(&*recorder);
    }

    EvolveOptions opts;
    opts.record_interval = cfg.record_interval;
    opts.record_every_steps = cfg.record_every_steps;
    bundle.final_state =
        evolve(std::move(state0), bundle.params, grid, cfg.solver, cfg.t_final, opts,
               observers);
    bundle.series = collector.series();
    if (with_history && bundle.history->times().empty()) {
        // zero-length run: seed the history with the initial state
        bundle.history->append(bundle.final_state.t, bundle.final_state.rho.values,
                               bundle.final_state.u.values);
    }
    return bundle;
}

RunResult run(const RunConfig& cfg) {
    RunResult result;
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        result.exit_code = kExitConfig;
        result.message = e.what();
        return result;
    }

    const ModelParams params = effective_params(cfg);
    RadialGrid grid = cfg.make_grid();
    const std::string provenance = one_line(cfg.resolved_text());

    fs::create_directories(cfg.out_dir);
    std::ostringstream summary;
    summary << "run summary\n===========\n\n" << cfg.resolved_text() << "\n";
    if (cfg.variant)
        summary << "shallow-water variant " << to_string(*cfg.variant)
                << " (height h = rho, mean velocity w = u)\n\n";

    // --- initial data construction + validation (report-only)
    FluidState state0;
    std::optional<InitDataReport> validation;
    try {
        state0 = build(cfg.init, grid, params);
        std::optional<double> sigma;
        if (cfg.init.kind == InitKind::PowerLaw) sigma = cfg.init.sigma;
        validation = validate_initial_data(state0, params, grid, cfg.q, cfg.tail_tol, sigma);
        result.validation = validation;
        summary << validation->to_text() << "\n";
    } catch (const std::exception& e) {
        result.exit_code = kExitConfig;
        result.message = std::string("initial data: ") + e.what();
        return result;
    }

    // --- evolve
    EvolveBundle bundle;
    SnapshotObserver snapshots(cfg.snapshot_interval, cfg.t_final);
    try {
        bundle.params = params;
        if (cfg.solver.formulation == Formulation::Reformulated)
            refresh_derived(state0, params, grid, Formulation::Reformulated);
        DiagnosticsCollector collector(params, grid, cfg.q);
        std::vector<StepObserver*> observers{&collector, &snapshots};
        std::optional<HistoryRecorder> recorder;
        if (cfg.characteristics_enabled) {
            bundle.history.emplace(grid, params);
            recorder.emplace(*bundle.history);
            observers.push_back(&*recorder);
        }
        EvolveOptions opts;
        opts.record_interval = cfg.record_interval;
        opts.record_every_steps = cfg.record_every_steps;
        bundle.final_state = evolve(std::move(state0), params, grid, cfg.solver,
                                    cfg.t_final, opts, observers);
        bundle.series = collector.series();
    } catch (const StepFailure& e) {
        result.exit_code = kExitStepFailure;
        std::ostringstream os;
        os << "step failure at t = " << e.t << ": " << e.what();
        result.message = os.str();
        summary << result.message << "\n";
        std::ofstream sf(fs::path(cfg.out_dir) / "summary.txt");
        sf << summary.str();
        return result;
    }
    result.series = bundle.series;
    result.final_state = bundle.final_state;

    // --- characteristic cross-check
    if (cfg.characteristics_enabled && bundle.history &&
        bundle.history->times().size() >= 2) {
        double worst = 0.0;
        for (double r0 : default_launch_radii(grid, cfg.characteristic_paths)) {
            CharacteristicPath path = trace_characteristic(*bundle.history, r0, cfg.t_final);
            if (path.exited || path.times.size() < 2) continue;
            const double v_char = v_along_path(*bundle.history, path).back();
            const double v_grid =
                interp_linear(grid, bundle.final_state.v, path.positions.back());
            worst = std::max(worst, std::abs(v_char - v_grid));
        }
        result.characteristic_gap = worst;
        summary << "characteristic cross-check: max |v_transport - v_grid| over "
                << cfg.characteristic_paths << " paths = " << worst << "\n\n";
    }

    // --- invariant checks
    result.checks = run_invariant_checks(cfg, bundle);
    bool all_pass = true;
    summary << "invariant checks\n";
    for (const auto& c : result.checks) {
        summary << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.name;
        if (!c.detail.empty()) summary << " -- " << c.detail;
        summary << "\n";
        all_pass = all_pass && c.pass;
    }
    summary << "\n";

    // --- final record and regularity norms
    if (!bundle.series.empty()) {
        const auto& last = bundle.series.back();
        summary << "final record (t = " << last.t << ")\n";
        summary << "  mass = " << last.mass << "\n  energy = " << last.energy << "\n";
        summary << "  bd_entropy = " << last.bd_entropy << "\n";
        summary << "  sup_rho = " << last.sup_rho << ", sup_v = " << last.sup_v
                << ", sup_psi = " << last.sup_psi << "\n";
        summary << "  psi_consistency = " << last.psi_consistency << "\n";
        summary << "  int_0^t |rho^(3/4) u|_inf ds = " << last.rho_iota_u_integral << "\n";
        const auto& rn = last.regularity;
        summary << "regularity norms (report only)\n";
        summary << "  |r^(m/2) rho^(g-1)|_2 = " << rn.rho_gamma_w_l2
                << ", |r^(m/2) d_r rho^(g-1)|_2 = " << rn.rho_gamma_r_w_l2
                << ", |r^(m/2) d_rr rho^(g-1)|_2 = " << rn.rho_gamma_rr_w_l2 << "\n";
        summary << "  |r^(m/2) u|_2 = " << rn.u_w_l2 << ", |r^(m/2) u_r|_2 = " << rn.u_r_w_l2
                << ", |r^(m/2) u_rr|_2 = " << rn.u_rr_w_l2 << "\n";
        summary << "  |r^(m/q) psi|_q = " << rn.psi_wq_lq
                << ", |r^(m/2) psi/r|_2 = " << rn.psi_over_r_w_l2
                << ", |r^(m/2) psi_r|_2 = " << rn.psi_r_w_l2 << "\n";
        summary << "  |r^(m/2) u_t|_2 = " << rn.u_t_w_l2
                << ", t^(1/2) |r^(m/2) u_tr|_2 = " << rn.u_tr_w_l2_tweighted << "\n";
    }

    // --- files
    {
        std::ofstream df(fs::path(cfg.out_dir) / "diagnostics.csv");
        emit_series(bundle.series, df, provenance);
    }
    if (cfg.write_snapshots) {
        for (const auto& s : snapshots.states()) {
            std::ofstream sf(fs::path(cfg.out_dir) / snapshot_filename(s.t));
            write_snapshot_csv(s, grid, sf, provenance);
        }
    }
    {
        std::ofstream sf(fs::path(cfg.out_dir) / "summary.txt");
        sf << summary.str();
    }

    if (!all_pass) {
        result.exit_code = kExitInvariant;
        result.message = "invariant check failed (see summary.txt)";
    }
    return result;
}

// ============================================================================
// Convergence study
// ============================================================================

double restriction_gap(const RadialGrid& coarse, const Field& coarse_f, const Field& fine_f,
                       int m) {
    const int n = coarse.size();
    if (static_cast<int>(fine_f.size()) != 2 * n - 1)
        throw std::invalid_argument("restriction_gap: grids are not nested");
    std::vector<double> diff(n);
    for (int i = 0; i < n; ++i) diff[i] = fine_f[2 * i] - coarse_f[i];
    return weighted_norm(coarse, Field(std::move(diff), "diff"), m, 2.0);
}

ConvergenceReport convergence_study(const RunConfig& cfg, int levels) {
    ConvergenceReport report;
    try {
        cfg.validate();
        if (levels < 3) throw ConfigError("convergence study needs at least 3 levels");

        const ModelParams params = effective_params(cfg);

        // Pin a deterministic dt cap from the coarsest initial state so that
        // (dt, dr) halve together across levels. The record interval is an
        // exact multiple of the cap, so landing on record times never clips
        // the step and every level runs at exactly its cap.
        double dt0;
        {
            RadialGrid g0 = cfg.make_grid();
            FluidState s0 = build(cfg.init, g0, params);
            // at least 16 coarse-level steps, so the O(dt) expansion is resolved
            dt0 = std::min(0.5 * cfl_dt(s0, params, g0, cfg.solver), cfg.t_final / 32.0);
        }
        const double record_interval =
            cfg.record_interval > 0.0
                ? cfg.record_interval
                : dt0 * std::max(1.0, std::ceil(cfg.t_final / (40.0 * dt0)));

        std::vector<EvolveBundle> bundles;
        for (int k = 0; k < levels; ++k) {
            RunConfig lc = cfg;
            lc.grid_N = (cfg.grid_N - 1) * (1 << k) + 1;
            lc.solver.dt_max = dt0 / (1 << k);
            lc.record_interval = record_interval;
            lc.characteristics_enabled = false;
            try {
                bundles.push_back(execute(lc, false));
            } catch (const StepFailure& e) {
                report.exit_code = kExitStepFailure;
                std::ostringstream os;
                os << "level " << k << " failed at t = " << e.t << ": " << e.what();
                report.message = os.str();
                break;
            }
            ConvergenceLevel lv;
            lv.N = lc.grid_N;
            lv.dt_cap = lc.solver.dt_max;
            if (bundles.back().series.size() >= 2) {
                lv.energy_residual_sum = energy_identity_residual(bundles.back().series).sum_abs;
                lv.bd_residual_sum = bd_identity_residual(bundles.back().series).sum_abs;
            }
            lv.psi_consistency_final = bundles.back().series.back().psi_consistency;
            report.levels.push_back(lv);
        }

        for (std::size_t k = 0; k + 1 < bundles.size(); ++k) {
            RadialGrid coarse(cfg.grid_a, cfg.grid_R, report.levels[k].N);
            report.levels[k].diff_rho =
                restriction_gap(coarse, bundles[k].final_state.rho,
                                bundles[k + 1].final_state.rho, params.m);
            report.levels[k].diff_u = restriction_gap(
                coarse, bundles[k].final_state.u, bundles[k + 1].final_state.u, params.m);
        }
        bool exact = !bundles.empty();
        for (std::size_t k = 0; k + 1 < bundles.size(); ++k)
            exact = exact && report.levels[k].diff_rho < 1e-14 &&
                    report.levels[k].diff_u < 1e-14;
        report.exact = exact && bundles.size() >= 2;
        if (!report.exact) {
            for (std::size_t k = 0; k + 2 < bundles.size(); ++k) {
                report.order_rho.push_back(std::log2(report.levels[k].diff_rho /
                                                     report.levels[k + 1].diff_rho));
                report.order_u.push_back(
                    std::log2(report.levels[k].diff_u / report.levels[k + 1].diff_u));
            }
        }

        // orders.csv
        fs::create_directories(cfg.out_dir);
        std::ofstream of(fs::path(cfg.out_dir) / "orders.csv");
        of << "# " << one_line(cfg.resolved_text()) << "\n";
        of << "level,N,dt_cap,diff_rho,diff_u,order_rho,order_u,"
              "energy_residual_sum,bd_residual_sum,psi_consistency_final\n";
        char buf[32];
        auto put = [&](double x) {
            std::snprintf(buf, sizeof buf, "%.17g", x);
            of << buf;
        };
        for (std::size_t k = 0; k < report.levels.size(); ++k) {
            const auto& lv = report.levels[k];
            of << k << "," << lv.N << ",";
            put(lv.dt_cap);
            of << ",";
            put(lv.diff_rho);
            of << ",";
            put(lv.diff_u);
            of << ",";
            if (k < report.order_rho.size()) put(report.order_rho[k]);
            of << ",";
            if (k < report.order_u.size()) put(report.order_u[k]);
            of << ",";
            put(lv.energy_residual_sum);
            of << ",";
            put(lv.bd_residual_sum);
            of << ",";
            put(lv.psi_consistency_final);
            of << "\n";
        }
    } catch (const ConfigError& e) {
        report.exit_code = kExitConfig;
        report.message = e.what();
    }
    return report;
}

// ============================================================================
// Shallow-water equivalence
// ============================================================================

ShallowEquivalenceReport shallow_equivalence(ShallowVariant variant, RunConfig cfg) {
    ShallowEquivalenceReport report;

    RunConfig shallow_cfg = cfg;
    shallow_cfg.variant = variant;
    shallow_cfg.out_dir = (fs::path(cfg.out_dir) / "shallow").string();

    RunConfig general_cfg = cfg;
    general_cfg.variant.reset();
    general_cfg.params = variant_params(variant);
    general_cfg.out_dir = (fs::path(cfg.out_dir) / "general").string();

    RunResult a = run(shallow_cfg);
    RunResult b = run(general_cfg);
    if (a.exit_code != kExitOk || b.exit_code != kExitOk) {
        report.exit_code = std::max(a.exit_code, b.exit_code);
        report.identical = false;
        report.detail = a.exit_code != kExitOk ? a.message : b.message;
        return report;
    }

    std::ifstream fa(fs::path(shallow_cfg.out_dir) / "diagnostics.csv");
    std::ifstream fb(fs::path(general_cfg.out_dir) / "diagnostics.csv");
    std::string la, lb;
    int line_no = 0;
    while (true) {
        const bool ga = static_cast<bool>(std::getline(fa, la));
        const bool gb = static_cast<bool>(std::getline(fb, lb));
        ++line_no;
        if (!ga && !gb) break;
        if (ga != gb || la != lb) {
            report.identical = false;
            std::ostringstream os;
            os << "first difference at line " << line_no << ":\n  shallow: "
               << (ga ? la : "<eof>") << "\n  general: " << (gb ? lb : "<eof>");
            report.detail = os.str();
            report.exit_code = kExitInvariant;
            break;
        }
    }
    return report;
}

// ============================================================================
// Characteristic refinement study
// ============================================================================

namespace {

double characteristic_gap(const RunConfig& cfg) {
    EvolveBundle bundle = execute(cfg, true);
    RadialGrid grid = cfg.make_grid();
    double worst = 0.0;
    for (double r0 : default_launch_radii(grid, cfg.characteristic_paths)) {
        CharacteristicPath path = trace_characteristic(*bundle.history, r0, cfg.t_final);
        if (path.exited || path.times.size() < 2) continue;
        const double v_char = v_along_path(*bundle.history, path).back();
        const double v_grid = interp_linear(grid, bundle.final_state.v, path.positions.back());
        worst = std::max(worst, std::abs(v_char - v_grid));
    }
    return worst;
}

} // namespace

CharacteristicsStudyReport characteristics_study(const RunConfig& cfg) {
    CharacteristicsStudyReport report;
    try {
        cfg.validate();
        const ModelParams params = effective_params(cfg);
        double dt0;
        {
            RadialGrid g0 = cfg.make_grid();
            FluidState s0 = build(cfg.init, g0, params);
            dt0 = 0.5 * cfl_dt(s0, params, g0, cfg.solver);
        }
        RunConfig coarse = cfg;
        coarse.solver.dt_max = dt0;
        RunConfig fine = cfg;
        fine.grid_N = 2 * cfg.grid_N - 1;
        fine.solver.dt_max = 0.5 * dt0;

        report.gap_coarse = characteristic_gap(coarse);
        report.gap_fine = characteristic_gap(fine);
        report.ratio = report.gap_fine > 0.0 ? report.gap_coarse / report.gap_fine : 0.0;

        fs::create_directories(cfg.out_dir);
        std::ofstream of(fs::path(cfg.out_dir) / "characteristics_study.txt");
        of << "characteristic cross-oracle refinement\n";
        of << "  coarse (N = " << cfg.grid_N << "): max gap = " << report.gap_coarse << "\n";
        of << "  fine   (N = " << fine.grid_N << "): max gap = " << report.gap_fine << "\n";
        of << "  ratio under (dt, dr) halving = " << report.ratio << "\n";
    } catch (const ConfigError& e) {
        report.exit_code = kExitConfig;
    } catch (const StepFailure&) {
        report.exit_code = kExitStepFailure;
    }
    return report;
}

} // namespace rcns
