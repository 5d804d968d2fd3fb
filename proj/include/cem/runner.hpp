#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cem/metrics.hpp"
#include "cem/models.hpp"
#include "cem/solvers.hpp"

namespace cem {

// Fully resolved run description. Every field has a documented default so a
// serialized config reproduces the run exactly.
struct RunConfig {
    std::string name;  // file prefix; empty -> derived from the model
    std::string model = "chain";
    DipoleChainParams chain;
    BiprimeParams biprime;

    std::vector<int> orders{1};
    bool exact = true;
    std::size_t grid_points = 1000;  // M; trajectories carry M+1 points
    IntegratorConfig integrator;
    bool conjugate_reduction = true;
    int workers = 0;  // OpenMP thread cap; 0 = runtime default

    struct Sweep {
        std::string axis;  // "d_over_lambda" | "eta_over_gamma"
        std::vector<double> values;
    };
    std::optional<Sweep> sweep;

    std::string output_dir = "out";
    std::string cache_dir;  // empty -> no derivation cache

    void validate() const;
    std::string resolved_name() const;
    int n_sites() const;

    std::string to_json_text() const;
    static RunConfig from_json_text(const std::string& text);
};

struct OrderRun {
    int order = 0;  // 0 = exact reference
    bool is_exact = false;
    Trajectory trajectory;
    double wall_seconds = 0.0;
    std::size_t variables = 0, discovered = 0, upper_bound = 0;
    std::vector<ErrorSummary> errors;
    BitReadout readout;
    bool readout_attempted = false;
    std::string trajectory_path, sidecar_path;
};

struct ScenarioResult {
    RunConfig config;
    int n_sites = 0;
    std::vector<OrderRun> runs;  // exact reference first when requested
    std::string table_path, report_path;

    const OrderRun* find(int order, bool exact = false) const;
};

// Runs every requested order (plus the exact reference), writes trajectory
// CSVs, sidecars, the error table and the run report. Solver-level failures
// are recorded per order; only config/IO problems throw.
ScenarioResult run_scenario(const RunConfig& cfg);

struct SweepCell {
    double axis_value = 0.0;
    int order = 0;
    bool is_exact = false;
    Trajectory::Status status = Trajectory::Status::Completed;
    std::string note;
};

struct SweepResult {
    RunConfig config;
    std::vector<SweepCell> cells;
    std::string csv_path, report_path;
};

// Chain-only axis sweep; cells run concurrently, failures are recorded and
// the sweep always completes.
SweepResult run_sweep(const RunConfig& cfg);

// Derivation only; returns the serialized equation system.
std::string derive_equations(const RunConfig& cfg, int order);

// Recompute an error table from trajectory CSVs on disk.
std::string recompute_table(const std::string& model, const std::string& exact_csv_path,
                            const std::vector<std::pair<int, std::string>>& order_csv_paths);

// Rerun support: extract the embedded config from a sidecar file.
RunConfig config_from_sidecar(const std::string& sidecar_path);

}  // namespace cem
