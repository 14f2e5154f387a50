/// @file config.hpp
/// @brief Structured key/value run configuration. Every key has a documented
///        default; unknown keys are hard errors so a typo cannot silently
///        change the physics.

#pragma once

#include "rcns/initdata.hpp"
#include "rcns/model.hpp"
#include "rcns/solver.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcns {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // model: either an explicit parameter set or a shallow-water variant
    std::optional<ShallowVariant> variant;
    ModelParams params;

    // grid
    double grid_a = 1.0;
    double grid_R = 20.0;
    int grid_N = 800;

    // time
    double t_final = 0.5;
    double record_interval = 0.0; ///< 0 selects the step-based cadence
    int record_every_steps = 10;

    // solver
    SolverConfig solver;

    // initial data
    InitSpec init;

    // validation
    double q = 4.0;          ///< exponent of the psi0 L^q norm, in (3, 6]
    double tail_tol = 1e-8;

    // characteristics cross-check
    bool characteristics_enabled = true;
    int characteristic_paths = 16;

    // output
    std::string out_dir = "out";
    double snapshot_interval = 0.0; ///< 0 means snapshots at t = 0 and t_final only
    bool write_snapshots = true;

    // studies
    int study_levels = 3;

    RadialGrid make_grid() const;
    void validate() const; ///< throws ConfigError on any violated invariant

    /// Canonical key = value rendering of the fully resolved configuration
    /// (variant presets expanded into numbers). Used as the provenance header
    /// of every output file.
    std::string resolved_text() const;
};

/// Parses "key = value" lines ('#' comments allowed). Unknown keys, malformed
/// lines and out-of-range values raise ConfigError.
RunConfig parse_config_text(const std::string& text);

RunConfig load_config_file(const std::string& path);

/// Applies a KEY=VALUE override string to an already-parsed config.
void apply_override(RunConfig& cfg, const std::string& key_value);

/// The full key list with defaults and one-line docs (--help output).
std::string config_reference();

} // namespace rcns
