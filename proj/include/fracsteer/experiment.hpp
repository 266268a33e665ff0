#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fracsteer/controllability.hpp"
#include "fracsteer/mild_solver.hpp"
#include "fracsteer/system_model.hpp"

namespace fracsteer {

// Orchestration layer: configuration documents, the built-in example system,
// batch runs, and CSV/report emission.  Everything here is plumbing; the
// numerics live in the lower modules.

inline constexpr const char* kToolVersion = "0.1.0";

// The configuration format can only express the two named nonsmooth
// families.  The declared form is kept next to the materialized term so a
// config can be serialized and hashed faithfully.
struct NonsmoothSpec {
    std::string type = "zero";  // "zero" or "scaled_abs"
    double bound_L = 0.0;       // subgradient bound, scaled_abs only
};

struct ExperimentConfig {
    ProblemConfig problem;
    NonsmoothSpec nonsmooth;
    std::vector<double> target_x1;          // terminal target; empty = unset
    std::size_t grid_size = 400;            // uniform cells on [0, b]
    std::vector<double> a_grid;             // strictly decreasing, all > 0
    std::string output_path = "sweep.csv";  // empty = do not write files
    std::optional<std::string> preset;      // provenance tag, not hashed
};

// Built-in example: heat conduction on (0, pi) truncated to 8 sine modes,
// with a linear-profile control column, a two-point nonlocal initial
// coupling, and a small bounded nonsmooth load.  The terminal target is the
// parabolic profile y(pi - y) expanded in the same basis.
ExperimentConfig heat_preset();

// Parse and fully validate a JSON configuration document.  Unknown keys are
// rejected at every level, and every failure message names the offending key
// together with the violated condition.  A "preset" entry starts from the
// built-in values; the remaining top-level keys override field-wise.
ExperimentConfig parse_config(const std::string& json_text);

// File wrapper around parse_config.  Unreadable file -> IoError.
ExperimentConfig load_config(const std::string& path);

// Re-run every bound check, snap the nonlocal times onto the current grid
// (rejecting any time farther than 1e-12 from every node), and materialize
// the nonsmooth term from its declared form.  The parsers call this; call
// it again after mutating fields such as grid_size.
void validate_config(ExperimentConfig& cfg);

// Canonical serialization of the resolved configuration and the FNV-1a hash
// of those bytes used in output headers.  Sorted keys; the preset tag and
// output_path are excluded, so the hash identifies the computation rather
// than where its results land.
std::string canonical_config_json(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

struct VerifyReport {
    SmallnessReport smallness;
    GrowthReport growth;
    ActuationReport actuation;
    bool all_hold = false;
    std::string text;  // pass/fail lines with the measured numbers
};

// Aggregate the standing-condition checks.  A failing condition makes a
// failing report, not an exception.
VerifyReport run_verify(const ExperimentConfig& cfg);

struct ResultTable {
    std::vector<SweepRow> rows;  // one per a_grid entry, in input order
    std::string config_hash;
    std::size_t grid_size = 0;
    std::string version;
};

struct SweepOutcome {
    ResultTable table;
    std::string csv_text;  // exactly the bytes written
    std::string path;      // destination, empty when writing was skipped
};

// Regularization sweep toward target_x1.  Requires a nonempty a_grid, a
// target of mode dimension, and a passing verification unless force is set
// (force also overrides the smallness gate in the kernel assembly).  When
// output_path is nonempty the CSV lands there; the table is returned either
// way.  Deterministic for a fixed config apart from the timestamp line.
SweepOutcome run_sweep(const ExperimentConfig& cfg, bool force = false);

struct SimulateOutcome {
    Trajectory x;  // response to the unit probe control
    std::size_t iterations = 0;
    bool converged = false;
    double weighted_norm = 0.0;
    double terminal_norm = 0.0;
    double nonlocal_gap = 0.0;    // |Gamma(alpha) lim t^{1-alpha}x - sum c_k x(t_k)|
    double nonlocal_scale = 0.0;  // 1 + weighted norm, the natural gap scale
    std::string text;
};

// Solve the uncontrolled-design problem under the constant control u = 1:
// iterate the mild map over the nonsmooth selection until the selection
// repeats or the weighted increment is negligible, then cross-check the
// nonlocal initial identity on the result.
SimulateOutcome run_simulate(const ExperimentConfig& cfg);

struct SynthesisOutcome {
    SynthesisResult result;
    double target_norm = 0.0;
    std::string text;
};

// Single steering synthesis at regularization a toward target_x1.
SynthesisOutcome run_synthesize(const ExperimentConfig& cfg, double reg_a);

struct OracleCheckData {
    std::vector<std::size_t> grid_sizes;  // refinement ladder
    std::vector<double> rel_errors;       // weighted-sup mismatch per level
    std::vector<double> orders;           // log2 of successive error ratios
    double observed_order = 0.0;          // worst of the above
    double alpha1_error = 0.0;            // both routes vs the classical ODE
    double free_evolution_error = 0.0;    // lambda = 0 seeded comparison
    bool refinement_ok = false;
    bool alpha1_ok = false;
    bool free_ok = false;
    bool all_ok = false;
    std::string text;
};

// Cross-validate the kernel-based solver against the independent Volterra
// stepper on the single-mode reduction of the configured system: refinement
// study at the configured alpha, classical reduction at alpha = 1, and free
// evolution with a seeded initial functional at lambda = 0.
OracleCheckData run_oracle_check(const ExperimentConfig& cfg);

}  // namespace fracsteer
