#pragma once

#include <Eigen/Dense>

#include "cem/eom.hpp"
#include "cem/trajectory.hpp"

namespace cem {

// Right-hand side of the compiled moment system at time t. The parallel
// kernel distributes variables over OpenMP threads; every output entry is
// computed by one thread in a fixed order, so results match the serial
// reference bit for bit.
void eval_moment_rhs_serial(const MomentODESystem& sys, double t,
                            const std::complex<double>* y, std::complex<double>* dydt);
void eval_moment_rhs_parallel(const MomentODESystem& sys, double t,
                              const std::complex<double>* y, std::complex<double>* dydt);

// Integrates the closed moment hierarchy over `grid` (monotone, starting at
// the initial time). Emits s22/sp/sm series per site; halts with Diverged
// status on magnitude blow-up or step underflow, keeping the valid prefix.
// `raw_samples` (optional) receives the full variable vector per grid point.
Trajectory integrate_moments(const MomentODESystem& sys, const Eigen::VectorXcd& init,
                             const std::vector<double>& grid, const IntegratorConfig& cfg,
                             std::vector<Eigen::VectorXcd>* raw_samples = nullptr);

// Dense Lindblad master-equation reference (2^N representation, N <= 12).
Trajectory solve_master_equation(const SystemSpec& sys, const Eigen::MatrixXcd& rho0,
                                 const std::vector<double>& grid, const IntegratorConfig& cfg);

// Dense state-vector reference for closed systems (N <= 20).
Trajectory solve_schrodinger(const SystemSpec& sys, const Eigen::VectorXcd& psi0,
                             const std::vector<double>& grid, const IntegratorConfig& cfg);

std::vector<double> uniform_grid(double t0, double t1, std::size_t points);

}  // namespace cem
