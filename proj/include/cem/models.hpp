#pragma once

#include <Eigen/Dense>

#include "cem/eom.hpp"

namespace cem {

// Driven dissipative chain of two-level emitters, equidistant spacing d,
// dipoles perpendicular to the chain axis. gamma sets the time unit.
struct DipoleChainParams {
    int n = 1;
    double d_over_lambda = 0.15;
    double gamma = 1.0;
    double eta_over_gamma = 2.0;
    double omega0 = 0.0;     // resonant rotating frame by default
    double t_total = 10.0;   // in units of 1/gamma
    double t_off = 5.0;      // drive switch-off time

    void validate() const;
};

// Coherent (Omega) and incoherent (Gamma) coupling matrices. Diagonal:
// Omega_ii = 0, Gamma_ii = gamma. Throws on d_over_lambda == 0 (pole).
struct DipoleCouplings {
    Eigen::MatrixXd omega;
    Eigen::MatrixXd gamma;
};
DipoleCouplings dipole_couplings(const DipoleChainParams& p);

// Free-space scalar coupling functions of xi = k0 * r.
double coupling_omega(double xi, double gamma);
double coupling_gamma(double xi, double gamma);

SystemSpec build_chain_system(const DipoleChainParams& p);

// Adiabatic factorization annealer for an odd bi-prime omega = a*b.
struct BiprimeParams {
    long long omega = 21;
    int k = 0;               // 0 -> derive from the factors
    int l = 0;
    double xi = 10.0;        // transverse field strength of the mixer
    double t_total = 10.0;   // overall sweep time T (s = t/T)
    double hbar_omega = 1.0; // energy scale of the cost Hamiltonian

    void validate() const;
};

struct BitLayout {
    int k = 0;
    int l = 0;
    int n = 0;  // qubit count k + l
    long long a = 0, b = 0;  // the factors, a >= b
};

// Minimal widths such that the factors fit in k+1 and l+1 bits with odd
// low bits, subject to k >= ceil(n/2) > l. Throws when omega is not an odd
// semiprime or the width constraint cannot hold (equal-width factors).
BitLayout biprime_bit_layout(long long omega);

SystemSpec build_biprime_system(const BiprimeParams& p);

}  // namespace cem
