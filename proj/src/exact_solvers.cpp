#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "cem/dense.hpp"
#include "cem/ode.hpp"
#include "cem/solvers.hpp"

namespace cem {

namespace {

struct HamiltonianParts {
    // one matrix per handle plus the handle-free part; H(t) assembled per call
    Eigen::MatrixXcd fixed;
    std::vector<std::pair<int, Eigen::MatrixXcd>> scheduled;
};

HamiltonianParts split_hamiltonian(const SystemSpec& sys) {
    const long dim = 1L << sys.n_sites;
    HamiltonianParts parts;
    parts.fixed = Eigen::MatrixXcd::Zero(dim, dim);
    OperatorSum fixed_sum = OperatorSum::zero(sys.n_sites);
    std::map<int, OperatorSum> tagged;
    for (const auto& t : sys.hamiltonian.terms()) {
        OperatorTerm plain = t;
        plain.handle = kNoHandle;
        auto one = OperatorSum::from_term(sys.n_sites, plain);
        if (t.handle == kNoHandle) {
            fixed_sum += one;
        } else {
            auto [it, unused] = tagged.try_emplace(t.handle, OperatorSum::zero(sys.n_sites));
            (void)unused;
            it->second += one;
        }
    }
    parts.fixed = to_matrix(fixed_sum);
    for (const auto& [h, sum] : tagged) parts.scheduled.emplace_back(h, to_matrix(sum));
    return parts;
}

Eigen::MatrixXcd hamiltonian_at(const HamiltonianParts& parts, const SystemSpec& sys,
                                double t) {
    Eigen::MatrixXcd h = parts.fixed;
    for (const auto& [handle, m] : parts.scheduled) h += sys.handles[handle].eval(t) * m;
    return h;
}

struct SiteObservables {
    std::vector<Eigen::MatrixXcd> s22, sp, sm;
};

SiteObservables site_observables(int n) {
    SiteObservables obs;
    for (int m = 1; m <= n; ++m) {
        obs.s22.push_back(to_matrix(OperatorSum::sigma22(n, m)));
        obs.sp.push_back(to_matrix(OperatorSum::sigma_plus(n, m)));
        obs.sm.push_back(to_matrix(OperatorSum::sigma_minus(n, m)));
    }
    return obs;
}

OdeOptions to_ode_options(const IntegratorConfig& cfg) {
    OdeOptions opt;
    opt.rel_tol = cfg.rel_tol;
    opt.abs_tol = cfg.abs_tol;
    opt.max_step = cfg.max_step;
    opt.divergence_bound = cfg.divergence_bound;
    opt.max_steps = cfg.max_steps;
    opt.method = cfg.method;
    return opt;
}

std::vector<double> schedule_cuts(const SystemSpec& sys, double t0, double t1) {
    std::vector<double> cuts{t0};
    for (const auto& h : sys.handles) h.append_breakpoints(t0, t1, cuts);
    cuts.push_back(t1);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

// shared segmented drive loop over a flattened complex state
OdeStatus integrate_segmented(const SystemSpec& sys, const OdeRhs& rhs,
                              std::vector<double>& y, const std::vector<double>& grid,
                              const OdeOptions& opt,
                              std::vector<Eigen::VectorXcd>& samples, std::size_t state_len,
                              std::size_t& emitted) {
    auto cuts = schedule_cuts(sys, grid.front(), grid.back());
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
            samples[base + k] = Eigen::Map<const Eigen::VectorXcd>(c, state_len);
            emitted = std::max(emitted, base + k + 1);
        };
        status = integrate_ode(rhs, y, a, b, seg_points, emit, opt);
        if (!status.ok()) break;
    }
    return status;
}

Trajectory assemble(const SystemSpec& sys, const std::vector<double>& grid,
                    const std::vector<Eigen::VectorXcd>& samples, std::size_t emitted,
                    const OdeStatus& status,
                    const std::function<Complex(const Eigen::VectorXcd&,
                                                const Eigen::MatrixXcd&)>& expectation,
                    const SiteObservables& obs, const char* conserved_name,
                    const std::function<double(const Eigen::VectorXcd&)>& conserved) {
    Trajectory traj;
    traj.grid = grid;
    traj.valid_points = emitted;
    switch (status.kind) {
        case OdeStatus::Kind::Completed: traj.status = Trajectory::Status::Completed; break;
        case OdeStatus::Kind::Diverged: traj.status = Trajectory::Status::Diverged; break;
        case OdeStatus::Kind::Failed: traj.status = Trajectory::Status::SolverFailure; break;
    }
    traj.stopped_at = status.t_last;
    traj.failure_reason = status.reason;

    // conservation surveillance (trace or norm)
    for (std::size_t i = 0; i < traj.valid_points; ++i) {
        const double drift = std::abs(conserved(samples[i]) - 1.0);
        traj.conservation_drift = std::max(traj.conservation_drift, drift);
        if (drift > 1e-6) {
            traj.status = Trajectory::Status::SolverFailure;
            traj.failure_reason = std::string(conserved_name) + " drift above 1e-6";
            traj.stopped_at = i > 0 ? grid[i - 1] : grid.front();
            traj.valid_points = i;
            break;
        }
    }

    const auto nan = std::complex<double>(std::nan(""), std::nan(""));
    const int n = sys.n_sites;
    for (int m = 1; m <= n; ++m) {
        const std::string idx = "[" + std::to_string(m) + "]";
        std::vector<std::complex<double>> c22(grid.size(), nan), cp(grid.size(), nan),
            cm(grid.size(), nan);
        for (std::size_t i = 0; i < traj.valid_points; ++i) {
            c22[i] = expectation(samples[i], obs.s22[m - 1]);
            cp[i] = expectation(samples[i], obs.sp[m - 1]);
            cm[i] = expectation(samples[i], obs.sm[m - 1]);
        }
        traj.series["s22" + idx] = std::move(c22);
        traj.series["sp" + idx] = std::move(cp);
        traj.series["sm" + idx] = std::move(cm);
    }
    traj.scan_physicality(n);
    return traj;
}

}  // namespace

Trajectory solve_master_equation(const SystemSpec& sys, const Eigen::MatrixXcd& rho0,
                                 const std::vector<double>& grid,
                                 const IntegratorConfig& cfg) {
    sys.validate();
    if (sys.n_sites > 12)
        throw std::out_of_range("dense master equation limited to 12 sites");
    if (grid.size() < 2) throw std::invalid_argument("grid needs at least two points");
    const long dim = 1L << sys.n_sites;
    if (rho0.rows() != dim || rho0.cols() != dim)
        throw std::invalid_argument("density matrix dimension mismatch");
    if (!rho0.isApprox(rho0.adjoint(), 1e-10))
        throw std::invalid_argument("density matrix must be Hermitian");
    if (std::abs(rho0.trace().real() - 1.0) > 1e-10 || std::abs(rho0.trace().imag()) > 1e-10)
        throw std::invalid_argument("density matrix must have unit trace");
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho0);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw std::invalid_argument("density matrix must be positive semidefinite");
    }

    const HamiltonianParts parts = split_hamiltonian(sys);
    const auto obs = site_observables(sys.n_sites);

    // dissipator precomputation: A = 1/2 sum_ij Gamma_ij sp_i sm_j
    Eigen::MatrixXcd damp = Eigen::MatrixXcd::Zero(dim, dim);
    struct Jump {
        Complex g;
        const Eigen::MatrixXcd *sm_i, *sp_j;
    };
    std::vector<Jump> jumps;
    for (const auto& chan : sys.dissipators)
        for (int i = 0; i < sys.n_sites; ++i)
            for (int j = 0; j < sys.n_sites; ++j) {
                const Complex g = chan.gamma(i, j);
                if (g == 0.0) continue;
                damp += 0.5 * g * obs.sp[i] * obs.sm[j];
                jumps.push_back({g, &obs.sm[i], &obs.sp[j]});
            }

    auto rhs = [&](double t, const double* yr, double* dydtr) {
        Eigen::Map<const Eigen::MatrixXcd> rho(
            reinterpret_cast<const std::complex<double>*>(yr), dim, dim);
        Eigen::Map<Eigen::MatrixXcd> drho(reinterpret_cast<std::complex<double>*>(dydtr),
                                          dim, dim);
        const Eigen::MatrixXcd h = hamiltonian_at(parts, sys, t);
        drho = Complex(0, 1) * (rho * h - h * rho);
        for (const auto& jump : jumps) drho += jump.g * (*jump.sm_i) * rho * (*jump.sp_j);
        drho -= damp * rho + rho * damp;
    };

    std::vector<double> y(2 * dim * dim);
    Eigen::Map<Eigen::MatrixXcd>(reinterpret_cast<std::complex<double>*>(y.data()), dim,
                                 dim) = rho0;

    std::vector<Eigen::VectorXcd> samples(grid.size());
    std::size_t emitted = 0;
    OdeStatus status = integrate_segmented(sys, rhs, y, grid, to_ode_options(cfg), samples,
                                           static_cast<std::size_t>(dim) * dim, emitted);

    auto expectation = [dim](const Eigen::VectorXcd& flat, const Eigen::MatrixXcd& op) {
        Eigen::Map<const Eigen::MatrixXcd> rho(flat.data(), dim, dim);
        return (op * rho).trace();
    };
    auto trace = [dim](const Eigen::VectorXcd& flat) {
        Eigen::Map<const Eigen::MatrixXcd> rho(flat.data(), dim, dim);
        return rho.trace().real();
    };
    return assemble(sys, grid, samples, emitted, status, expectation, obs, "trace", trace);
}

Trajectory solve_schrodinger(const SystemSpec& sys, const Eigen::VectorXcd& psi0,
                             const std::vector<double>& grid, const IntegratorConfig& cfg) {
    sys.validate();
    if (!sys.closed())
        throw std::invalid_argument("state-vector solver requires a closed system");
    if (sys.n_sites > 20) throw std::out_of_range("dense state vector limited to 20 sites");
    if (grid.size() < 2) throw std::invalid_argument("grid needs at least two points");
    const long dim = 1L << sys.n_sites;
    if (psi0.size() != dim) throw std::invalid_argument("state vector dimension mismatch");
    if (std::abs(psi0.squaredNorm() - 1.0) > 1e-10)
        throw std::invalid_argument("state vector must be normalized");

    const HamiltonianParts parts = split_hamiltonian(sys);
    const auto obs = site_observables(sys.n_sites);

    // explicit RK does not conserve the norm structurally; a tolerance
    // ceiling keeps the drift within the 1e-9 contract
    IntegratorConfig tight = cfg;
    tight.rel_tol = std::min(cfg.rel_tol, 1e-11);
    tight.abs_tol = std::min(cfg.abs_tol, 1e-13);

    auto rhs = [&](double t, const double* yr, double* dydtr) {
        Eigen::Map<const Eigen::VectorXcd> psi(
            reinterpret_cast<const std::complex<double>*>(yr), dim);
        Eigen::Map<Eigen::VectorXcd> dpsi(reinterpret_cast<std::complex<double>*>(dydtr),
                                          dim);
        dpsi = Complex(0, -1) * (hamiltonian_at(parts, sys, t) * psi);
    };

    std::vector<double> y(2 * dim);
    Eigen::Map<Eigen::VectorXcd>(reinterpret_cast<std::complex<double>*>(y.data()), dim) =
        psi0;

    std::vector<Eigen::VectorXcd> samples(grid.size());
    std::size_t emitted = 0;
    OdeStatus status = integrate_segmented(sys, rhs, y, grid, to_ode_options(tight), samples,
                                           static_cast<std::size_t>(dim), emitted);

    auto expectation = [](const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& op) {
        return Complex(psi.adjoint() * (op * psi));
    };
    auto norm = [](const Eigen::VectorXcd& psi) { return psi.squaredNorm(); };
    return assemble(sys, grid, samples, emitted, status, expectation, obs, "norm", norm);
}

}  // namespace cem
