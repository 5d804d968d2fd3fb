#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cem {

struct OdeOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 0.0;           // 0 -> interval length (dopri5); rk4 requires > 0
    double divergence_bound = 1e6;   // per-component magnitude ceiling
    long max_steps = 50'000'000;
    std::string method = "dopri5";   // "dopri5" | "rk4"
};

struct OdeStatus {
    enum class Kind { Completed, Diverged, Failed };
    Kind kind = Kind::Completed;
    double t_last = 0.0;    // last time with a valid state
    std::string reason;
    long n_steps = 0;
    long n_rejected = 0;

    bool ok() const { return kind == Kind::Completed; }
};

using OdeRhs = std::function<void(double t, const double* y, double* dydt)>;
// emit(grid_index, state) is called in increasing grid order for every
// output time reached before a divergence/failure.
using OdeEmit = std::function<void(std::size_t, const double*)>;

// Integrates y' = f(t, y) from t0 to t1 (t1 > t0), sampling dense output at
// `output_times` (monotone, within [t0, t1]). On return `y` holds the state
// at t1 (completed) or at the last valid time.
OdeStatus integrate_ode(const OdeRhs& rhs, std::vector<double>& y, double t0, double t1,
                        std::span<const double> output_times, const OdeEmit& emit,
                        const OdeOptions& opt);

}  // namespace cem
