#include "rcns/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace rcns {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
    return x;
}

int parse_int(const std::string& key, const std::string& v) {
    const double x = parse_double(key, v);
    if (x != std::floor(x))
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
    return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

struct KeyDoc {
    const char* key;
    const char* def;
    const char* doc;
};

constexpr KeyDoc kKeys[] = {
    {"model.variant", "none", "none | div_h_d | div_2h_d | div_h_grad (shallow-water preset)"},
    {"model.A", "1.0", "entropy constant of P = A rho^gamma"},
    {"model.gamma", "2.0", "adiabatic exponent (> 1; > 3/2 for the global regime)"},
    {"model.alpha", "1.0", "shear viscosity constant, mu = alpha rho"},
    {"model.beta", "0.0", "bulk viscosity constant (must stay 0)"},
    {"model.d", "3", "spatial dimension, 2 or 3"},
    {"grid.a", "1.0", "inner (wall) radius"},
    {"grid.R", "20.0", "truncation radius"},
    {"grid.N", "800", "node count (>= 16)"},
    {"time.cfl", "0.4", "Courant number in (0, 1]"},
    {"time.dt_max", "0.05", "hard cap on the time step"},
    {"time.t_final", "0.5", "final time"},
    {"time.record_interval", "0.0", "diagnostics record spacing in time; 0 = step based"},
    {"time.record_every_steps", "10", "record cadence in steps when record_interval = 0"},
    {"solver.formulation", "conservative", "conservative | reformulated"},
    {"solver.picard_tol", "1e-10", "weighted-L2 increment tolerance of the Picard loop"},
    {"solver.picard_max_iter", "50", "Picard iteration cap"},
    {"solver.far_bc", "dirichlet_zero_u_extrapolate_rho", "far-field boundary treatment"},
    {"init.kind", "power_law", "power_law | exponential | custom"},
    {"init.sigma", "2.0", "power-law decay exponent, rho0 = 1/(1 + r^(2 sigma))"},
    {"init.u_amplitude", "0.5", "velocity bump amplitude"},
    {"init.u_support_lo", "2.0", "bump support, lower end (inside (a, R))"},
    {"init.u_support_hi", "5.0", "bump support, upper end"},
    {"init.rho_file", "", "two-column CSV (r, value) for custom rho0"},
    {"init.u_file", "", "two-column CSV (r, value) for custom u0"},
    {"init.require_global_regime", "false", "reject power-law data with sigma <= d/2"},
    {"validation.q", "4.0", "exponent of the psi0 L^q admissibility norm, in (3, 6]"},
    {"validation.tail_tol", "1e-8", "warn when rho0(R) R^m exceeds this"},
    {"characteristics.enabled", "true", "run the characteristic cross-check after evolve"},
    {"characteristics.paths", "16", "number of launch radii"},
    {"output.dir", "out", "output directory"},
    {"output.snapshot_interval", "0.0", "snapshot spacing in time; 0 = t0 and t_final only"},
    {"output.write_snapshots", "true", "write snapshot_<t>.csv files"},
    {"study.levels", "3", "refinement levels used by --study convergence"},
};

void assign(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "model.variant") {
        if (value == "none") c.variant.reset();
        else if (value == "div_h_d") c.variant = ShallowVariant::DivHD;
        else if (value == "div_2h_d") c.variant = ShallowVariant::Div2HD;
        else if (value == "div_h_grad") c.variant = ShallowVariant::DivHGrad;
        else throw ConfigError("config: unknown shallow variant '" + value + "'");
    } else if (key == "model.A") {
        c.params.A = parse_double(key, value);
    } else if (key == "model.gamma") {
        c.params.gamma = parse_double(key, value);
    } else if (key == "model.alpha") {
        c.params.alpha = parse_double(key, value);
    } else if (key == "model.beta") {
        c.params.beta = parse_double(key, value);
    } else if (key == "model.d") {
        c.params.d = parse_int(key, value);
        c.params.m = c.params.d - 1;
    } else if (key == "grid.a") {
        c.grid_a = parse_double(key, value);
    } else if (key == "grid.R") {
        c.grid_R = parse_double(key, value);
    } else if (key == "grid.N") {
        c.grid_N = parse_int(key, value);
    } else if (key == "time.cfl") {
        c.solver.cfl = parse_double(key, value);
    } else if (key == "time.dt_max") {
        c.solver.dt_max = parse_double(key, value);
    } else if (key == "time.t_final") {
        c.t_final = parse_double(key, value);
    } else if (key == "time.record_interval") {
        c.record_interval = parse_double(key, value);
    } else if (key == "time.record_every_steps") {
        c.record_every_steps = parse_int(key, value);
    } else if (key == "solver.formulation") {
        if (value == "conservative") c.solver.formulation = Formulation::Conservative;
        else if (value == "reformulated") c.solver.formulation = Formulation::Reformulated;
        else throw ConfigError("config: unknown formulation '" + value + "'");
    } else if (key == "solver.picard_tol") {
        c.solver.picard_tol = parse_double(key, value);
    } else if (key == "solver.picard_max_iter") {
        c.solver.picard_max_iter = parse_int(key, value);
    } else if (key == "solver.far_bc") {
        if (value != "dirichlet_zero_u_extrapolate_rho")
            throw ConfigError("config: unknown far boundary treatment '" + value + "'");
        c.solver.far_bc = FarFieldBC::DirichletZeroU_ExtrapolateRho;
    } else if (key == "init.kind") {
        if (value == "power_law") c.init.kind = InitKind::PowerLaw;
        else if (value == "exponential") c.init.kind = InitKind::Exponential;
        else if (value == "custom") c.init.kind = InitKind::Custom;
        else throw ConfigError("config: unknown init kind '" + value + "'");
    } else if (key == "init.sigma") {
        c.init.sigma = parse_double(key, value);
    } else if (key == "init.u_amplitude") {
        c.init.u_amplitude = parse_double(key, value);
    } else if (key == "init.u_support_lo") {
        c.init.u_support_lo = parse_double(key, value);
    } else if (key == "init.u_support_hi") {
        c.init.u_support_hi = parse_double(key, value);
    } else if (key == "init.rho_file") {
        c.init.rho_file = value;
    } else if (key == "init.u_file") {
        c.init.u_file = value;
    } else if (key == "init.require_global_regime") {
        c.init.require_global_regime = parse_bool(key, value);
    } else if (key == "validation.q") {
        c.q = parse_double(key, value);
    } else if (key == "validation.tail_tol") {
        c.tail_tol = parse_double(key, value);
    } else if (key == "characteristics.enabled") {
        c.characteristics_enabled = parse_bool(key, value);
    } else if (key == "characteristics.paths") {
        c.characteristic_paths = parse_int(key, value);
    } else if (key == "output.dir") {
        c.out_dir = value;
    } else if (key == "output.snapshot_interval") {
        c.snapshot_interval = parse_double(key, value);
    } else if (key == "output.write_snapshots") {
        c.write_snapshots = parse_bool(key, value);
    } else if (key == "study.levels") {
        c.study_levels = parse_int(key, value);
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

} // namespace

RadialGrid RunConfig::make_grid() const { return RadialGrid(grid_a, grid_R, grid_N); }

void RunConfig::validate() const {
    ModelParams effective = variant ? variant_params(*variant) : params;
    auto errs = effective.validate();
    if (!errs.empty()) throw ConfigError("config: " + errs.front());
    try {
        (void)make_grid();
        solver.require_valid();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!(t_final >= 0.0)) throw ConfigError("config: time.t_final must be >= 0");
    if (record_interval < 0.0) throw ConfigError("config: time.record_interval must be >= 0");
    if (record_every_steps < 1)
        throw ConfigError("config: time.record_every_steps must be >= 1");
    if (!(q > 3.0 && q <= 6.0)) throw ConfigError("config: validation.q must lie in (3, 6]");
    if (!(tail_tol > 0.0)) throw ConfigError("config: validation.tail_tol must be positive");
    if (characteristic_paths < 1)
        throw ConfigError("config: characteristics.paths must be >= 1");
    if (snapshot_interval < 0.0)
        throw ConfigError("config: output.snapshot_interval must be >= 0");
    if (study_levels < 3) throw ConfigError("config: study.levels must be >= 3");
    if (init.kind == InitKind::Custom && init.rho_file.empty())
        throw ConfigError("config: init.kind = custom requires init.rho_file");
}

std::string RunConfig::resolved_text() const {
    ModelParams effective = variant ? variant_params(*variant) : params;
    char buf[64];
    auto num = [&buf](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    std::ostringstream os;
    os << "model.A = " << num(effective.A) << "\n";
    os << "model.gamma = " << num(effective.gamma) << "\n";
    os << "model.alpha = " << num(effective.alpha) << "\n";
    os << "model.beta = " << num(effective.beta) << "\n";
    os << "model.d = " << effective.d << "\n";
    os << "grid.a = " << num(grid_a) << "\n";
    os << "grid.R = " << num(grid_R) << "\n";
    os << "grid.N = " << grid_N << "\n";
    os << "time.cfl = " << num(solver.cfl) << "\n";
    os << "time.dt_max = " << num(solver.dt_max) << "\n";
    os << "time.t_final = " << num(t_final) << "\n";
    os << "time.record_interval = " << num(record_interval) << "\n";
    os << "time.record_every_steps = " << record_every_steps << "\n";
    os << "solver.formulation = "
       << (solver.formulation == Formulation::Conservative ? "conservative" : "reformulated")
       << "\n";
    os << "solver.picard_tol = " << num(solver.picard_tol) << "\n";
    os << "solver.picard_max_iter = " << solver.picard_max_iter << "\n";
    os << "solver.far_bc = dirichlet_zero_u_extrapolate_rho\n";
    os << "init.kind = "
       << (init.kind == InitKind::PowerLaw
               ? "power_law"
               : (init.kind == InitKind::Exponential ? "exponential" : "custom"))
       << "\n";
    os << "init.sigma = " << num(init.sigma) << "\n";
    os << "init.u_amplitude = " << num(init.u_amplitude) << "\n";
    os << "init.u_support_lo = " << num(init.u_support_lo) << "\n";
    os << "init.u_support_hi = " << num(init.u_support_hi) << "\n";
    if (!init.rho_file.empty()) os << "init.rho_file = " << init.rho_file << "\n";
    if (!init.u_file.empty()) os << "init.u_file = " << init.u_file << "\n";
    os << "validation.q = " << num(q) << "\n";
    os << "validation.tail_tol = " << num(tail_tol) << "\n";
    os << "characteristics.enabled = " << (characteristics_enabled ? "true" : "false") << "\n";
    os << "characteristics.paths = " << characteristic_paths << "\n";
    return os.str();
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not of the form key = value");
        assign(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& key_value) {
    const auto eq = key_value.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + key_value + "' is not of the form KEY=VALUE");
    assign(cfg, trim(key_value.substr(0, eq)), trim(key_value.substr(eq + 1)));
}

std::string config_reference() {
    std::ostringstream os;
    os << "configuration keys (key = default  # description):\n";
    for (const auto& k : kKeys)
        os << "  " << k.key << " = " << k.def << "  # " << k.doc << "\n";
    return os.str();
}

} // namespace rcns
