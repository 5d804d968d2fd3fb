#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cem {

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 0.0;
    double divergence_bound = 1e6;
    long max_steps = 2'000'000;    // smooth runs take 1e3..1e5; erratic ones hit this
    std::string method = "dopri5";
    bool parallel_rhs = true;  // OpenMP across variables; bit-identical to serial
};

// Time grid plus per-observable complex series. All series share the grid
// length; after a divergence the remaining entries are NaN.
struct Trajectory {
    enum class Status { Completed, Diverged, SolverFailure };

    std::vector<double> grid;
    std::map<std::string, std::vector<std::complex<double>>> series;

    Status status = Status::Completed;
    double stopped_at = 0.0;     // valid-data end for Diverged/SolverFailure
    std::string failure_reason;
    std::size_t valid_points = 0;  // grid entries with data
    double conservation_drift = 0.0;  // exact solvers: max |trace or norm - 1|

    // First time a monitored physical range was left (diagnostic only).
    struct Violation {
        double time;
        std::string what;
    };
    std::optional<Violation> first_violation;

    bool completed() const { return status == Status::Completed; }
    const std::vector<std::complex<double>>& at(const std::string& key) const;

    // Derived real observable: kind in {"22","z","x"}, site in [1,N], or
    // site 0 for the mean over sites.
    std::vector<double> real_observable(const std::string& kind, int site, int n_sites) const;

    void scan_physicality(int n_sites);
};

std::string status_name(Trajectory::Status s);
Trajectory::Status status_from_name(const std::string& name);

// CSV with header row: time plus <key>.re/<key>.im per series column.
std::string trajectory_csv(const Trajectory& t);
Trajectory trajectory_from_csv(const std::string& csv);

}  // namespace cem
