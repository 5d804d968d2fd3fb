// Timing comparison between the serial reference kernels and their OpenMP
// counterparts: hierarchy derivation and right-hand-side evaluation.

#include <omp.h>

#include <complex>
#include <cstdio>
#include <random>
#include <vector>

#include "cem/models.hpp"
#include "cem/solvers.hpp"

namespace {

double time_rhs(const cem::MomentODESystem& sys, bool parallel, int reps,
                const std::vector<std::complex<double>>& y) {
    std::vector<std::complex<double>> dydt(sys.size());
    const double tic = omp_get_wtime();
    for (int r = 0; r < reps; ++r) {
        if (parallel)
            cem::eval_moment_rhs_parallel(sys, 0.5, y.data(), dydt.data());
        else
            cem::eval_moment_rhs_serial(sys, 0.5, y.data(), dydt.data());
    }
    return (omp_get_wtime() - tic) / reps;
}

double time_derivation(const cem::SystemSpec& spec, int order, bool parallel) {
    const double tic = omp_get_wtime();
    auto sys = cem::generate_closed_system(spec, {order, true, parallel});
    (void)sys;
    return omp_get_wtime() - tic;
}

}  // namespace

int main(int argc, char** argv) {
    int n = 6;
    int order = 3;
    int reps = 50;
    if (argc > 1) n = std::atoi(argv[1]);
    if (argc > 2) order = std::atoi(argv[2]);
    if (argc > 3) reps = std::atoi(argv[3]);

    cem::DipoleChainParams p;
    p.n = n;
    p.d_over_lambda = 0.1;
    p.eta_over_gamma = 2.0;
    const cem::SystemSpec spec = cem::build_chain_system(p);

    std::printf("chain N=%d order=%d, %d OpenMP threads\n", n, order, omp_get_max_threads());

    const double t_ser = time_derivation(spec, order, false);
    const double t_par = time_derivation(spec, order, true);
    std::printf("%-28s %10.1f ms %10.1f ms  speedup %.2fx\n", "derivation (serial/omp)",
                1e3 * t_ser, 1e3 * t_par, t_ser / t_par);

    const auto sys = cem::generate_closed_system(spec, {order, true, true});
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    std::vector<std::complex<double>> y(sys.size());
    for (auto& v : y) v = {dist(rng), dist(rng)};

    const double r_ser = time_rhs(sys, false, reps, y);
    const double r_par = time_rhs(sys, true, reps, y);
    std::printf("%-28s %10.3f ms %10.3f ms  speedup %.2fx  (%zu variables)\n",
                "rhs evaluation (serial/omp)", 1e3 * r_ser, 1e3 * r_par, r_ser / r_par,
                sys.size());
    return 0;
}
