/// @file runner.hpp
/// @brief Batch driver: executes configured runs, refinement studies and the
///        shallow-water equivalence check, and writes the output file set
///        (diagnostics.csv, snapshot_<t>.csv, summary.txt, orders.csv).
///
/// Exit codes partition failures disjointly: 0 success, 2 configuration
/// error, 3 step failure, 4 invariant-check failure.

#pragma once

#include "rcns/characteristics.hpp"
#include "rcns/config.hpp"
#include "rcns/diagnostics.hpp"
#include "rcns/solver.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rcns {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitStepFailure = 3;
inline constexpr int kExitInvariant = 4;

struct CheckOutcome {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct RunResult {
    int exit_code = kExitOk;
    std::string message;
    std::vector<DiagnosticsRecord> series;
    std::optional<FluidState> final_state;
    std::optional<InitDataReport> validation;
    std::vector<CheckOutcome> checks;
    /// max over launch radii of |v along the characteristic - grid v|
    std::optional<double> characteristic_gap;
};

/// Full pipeline: validate config, build data, validate data, evolve,
/// characteristic cross-check, invariant checks, file output.
RunResult run(const RunConfig& cfg);

// ----------------------------------------------------------------------------
// Studies
// ----------------------------------------------------------------------------

struct ConvergenceLevel {
    int N = 0;
    double dt_cap = 0.0;
    double diff_rho = 0.0; ///< weighted-L2 gap to the next-finer level
    double diff_u = 0.0;
    double energy_residual_sum = 0.0;
    double bd_residual_sum = 0.0;
    double psi_consistency_final = 0.0;
};

struct ConvergenceReport {
    int exit_code = kExitOk;
    std::string message;
    std::vector<ConvergenceLevel> levels;
    std::vector<double> order_rho; ///< log2 ratios of successive diffs
    std::vector<double> order_u;
    bool exact = false; ///< successive solutions coincide (steady state)
};

/// Runs `levels` nested refinements (N -> 2N-1, dt cap halved) of the
/// configured problem and reports observed orders for (rho, u) and the
/// refinement behavior of the identity residuals. Writes orders.csv.
ConvergenceReport convergence_study(const RunConfig& cfg, int levels);

struct ShallowEquivalenceReport {
    int exit_code = kExitOk;
    bool identical = true;
    std::string detail; ///< first differing record line, when any
};

/// Runs the shallow-water-labeled path and the general solver with the mapped
/// parameters and asserts bitwise-identical diagnostics series.
ShallowEquivalenceReport shallow_equivalence(ShallowVariant variant, RunConfig cfg);

struct CharacteristicsStudyReport {
    int exit_code = kExitOk;
    double gap_coarse = 0.0;
    double gap_fine = 0.0;
    double ratio = 0.0; ///< gap_coarse / gap_fine under (dt, dr) halving
};

/// Two-level refinement of the characteristic cross-oracle.
CharacteristicsStudyReport characteristics_study(const RunConfig& cfg);

// ----------------------------------------------------------------------------
// Shared helpers (also used by the test suites)
// ----------------------------------------------------------------------------

struct EvolveBundle {
    ModelParams params;
    FluidState final_state;
    std::vector<DiagnosticsRecord> series;
    std::optional<SolutionHistory> history;
};

/// Evolves one configured problem without touching the filesystem.
EvolveBundle execute(const RunConfig& cfg, bool with_history);

/// Weighted-L2 gap between a fine solution restricted to the coarse nodes
/// (N_fine = 2 N_coarse - 1) and the coarse solution.
double restriction_gap(const RadialGrid& coarse, const Field& coarse_f,
                       const Field& fine_f, int m);

void write_snapshot_csv(const FluidState& s, const RadialGrid& g, std::ostream& sink,
                        const std::string& provenance);

} // namespace rcns
