#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cem/ode.hpp"
#include "cem/solvers.hpp"

namespace cem {

namespace {

std::complex<double> monomial_value(const CompiledMonomial& mono,
                                    const std::complex<double>* y) {
    std::complex<double> v = mono.coeff;
    for (auto [idx, conj] : mono.factors) v *= conj ? std::conj(y[idx]) : y[idx];
    return v;
}

inline std::complex<double> variable_rhs(const MomentODESystem& sys,
                                         const std::vector<double>& handle_values,
                                         std::size_t i, const std::complex<double>* y) {
    std::complex<double> acc = 0.0;
    for (const auto& mono : sys.rhs[i]) {
        std::complex<double> v = monomial_value(mono, y);
        if (mono.handle != kNoHandle) v *= handle_values[mono.handle];
        acc += v;
    }
    return acc;
}

std::vector<double> handle_values_at(const MomentODESystem& sys, double t) {
    std::vector<double> vals(sys.handles.size());
    for (std::size_t h = 0; h < sys.handles.size(); ++h) vals[h] = sys.handles[h].eval(t);
    return vals;
}

}  // namespace

void eval_moment_rhs_serial(const MomentODESystem& sys, double t,
                            const std::complex<double>* y, std::complex<double>* dydt) {
    const auto handle_values = handle_values_at(sys, t);
    for (std::size_t i = 0; i < sys.size(); ++i)
        dydt[i] = variable_rhs(sys, handle_values, i, y);
}

void eval_moment_rhs_parallel(const MomentODESystem& sys, double t,
                              const std::complex<double>* y, std::complex<double>* dydt) {
    const auto handle_values = handle_values_at(sys, t);
    const std::int64_t n = static_cast<std::int64_t>(sys.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        dydt[i] = variable_rhs(sys, handle_values, static_cast<std::size_t>(i), y);
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t points) {
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(points - 1);
    return g;
}

Trajectory integrate_moments(const MomentODESystem& sys, const Eigen::VectorXcd& init,
                             const std::vector<double>& grid, const IntegratorConfig& cfg,
                             std::vector<Eigen::VectorXcd>* raw_samples) {
    if (static_cast<std::size_t>(init.size()) != sys.size())
        throw std::invalid_argument("initial vector length does not match variable count");
    if (grid.size() < 2) throw std::invalid_argument("grid needs at least two points");

    const std::size_t nv = sys.size();
    const std::size_t dim = 2 * nv;
    std::vector<double> y(dim);
    for (std::size_t i = 0; i < nv; ++i) {
        y[2 * i] = init(static_cast<long>(i)).real();
        y[2 * i + 1] = init(static_cast<long>(i)).imag();
    }

    // complex state stored as interleaved re/im; scratch per call keeps the
    // RHS reentrant
    const bool parallel = cfg.parallel_rhs;
    auto rhs = [&sys, parallel](double t, const double* yr, double* dydtr) {
        const auto* yc = reinterpret_cast<const std::complex<double>*>(yr);
        auto* dc = reinterpret_cast<std::complex<double>*>(dydtr);
        if (parallel)
            eval_moment_rhs_parallel(sys, t, yc, dc);
        else
            eval_moment_rhs_serial(sys, t, yc, dc);
    };

    Trajectory traj;
    traj.grid = grid;
    std::vector<std::vector<std::complex<double>>> samples(
        grid.size(), std::vector<std::complex<double>>(nv,
                                                       {std::nan(""), std::nan("")}));
    std::size_t emitted = 0;

    OdeOptions opt;
    opt.rel_tol = cfg.rel_tol;
    opt.abs_tol = cfg.abs_tol;
    opt.max_step = cfg.max_step;
    opt.divergence_bound = cfg.divergence_bound;
    opt.max_steps = cfg.max_steps;
    opt.method = cfg.method;

    // split at schedule discontinuities so adaptive steps never straddle one
    std::vector<double> cuts{grid.front()};
    for (const auto& h : sys.handles)
        h.append_breakpoints(grid.front(), grid.back(), cuts);
    cuts.push_back(grid.back());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    OdeStatus status;
    status.t_last = grid.front();
    std::size_t next_grid = 0;
    for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
        const double a = cuts[seg], b = cuts[seg + 1];
        const bool final_seg = seg + 2 == cuts.size();
        std::vector<double> seg_points;
        while (next_grid < grid.size() &&
               (grid[next_grid] < b || (final_seg && grid[next_grid] <= b + 1e-14))) {
            seg_points.push_back(grid[next_grid]);
            ++next_grid;
        }
        const std::size_t base = emitted;
        auto emit = [&](std::size_t k, const double* state) {
            const auto* c = reinterpret_cast<const std::complex<double>*>(state);
            std::copy(c, c + nv, samples[base + k].begin());
            emitted = std::max(emitted, base + k + 1);
        };
        status = integrate_ode(rhs, y, a, b, seg_points, emit, opt);
        if (!status.ok()) break;
    }

    traj.valid_points = emitted;
    switch (status.kind) {
        case OdeStatus::Kind::Completed: traj.status = Trajectory::Status::Completed; break;
        case OdeStatus::Kind::Diverged: traj.status = Trajectory::Status::Diverged; break;
        case OdeStatus::Kind::Failed: traj.status = Trajectory::Status::SolverFailure; break;
    }
    traj.stopped_at = status.t_last;
    traj.failure_reason = status.reason;

    // reconstruct the per-site first-order series
    const auto nan = std::complex<double>(std::nan(""), std::nan(""));
    for (int m = 1; m <= sys.n_sites; ++m) {
        const std::string idx = "[" + std::to_string(m) + "]";
        for (OpKind kind : {OpKind::Sigma22, OpKind::SigmaPlus, OpKind::SigmaMinus}) {
            Moment mom{{{m, kind}}};
            auto hit = sys.lookup(mom);
            if (!hit) throw std::logic_error("first-order moment missing from system");
            std::vector<std::complex<double>> col(grid.size(), nan);
            for (std::size_t i = 0; i < traj.valid_points; ++i) {
                auto v = samples[i][hit->first];
                col[i] = hit->second ? std::conj(v) : v;
            }
            traj.series[std::string(op_kind_label(kind)) + idx] = std::move(col);
        }
    }
    traj.scan_physicality(sys.n_sites);

    if (raw_samples) {
        raw_samples->clear();
        raw_samples->reserve(traj.valid_points);
        for (std::size_t i = 0; i < traj.valid_points; ++i)
            raw_samples->push_back(Eigen::Map<const Eigen::VectorXcd>(
                samples[i].data(), static_cast<long>(nv)));
    }
    return traj;
}

}  // namespace cem
