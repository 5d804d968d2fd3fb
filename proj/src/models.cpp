#include "cem/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cem {

void DipoleChainParams::validate() const {
    if (n < 1) throw std::invalid_argument("chain needs at least one emitter");
    if (d_over_lambda <= 0.0)
        throw std::invalid_argument("d/lambda must be positive (xi = 0 pole)");
    if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
    if (t_total <= 0.0) throw std::invalid_argument("t_total must be positive");
    if (t_off > t_total) throw std::invalid_argument("t_off must not exceed t_total");
}

double coupling_omega(double xi, double gamma) {
    return -0.75 * gamma *
           (std::cos(xi) / xi - (std::sin(xi) / (xi * xi) + std::cos(xi) / (xi * xi * xi)));
}

double coupling_gamma(double xi, double gamma) {
    return 1.5 * gamma *
           (std::sin(xi) / xi + (std::cos(xi) / (xi * xi) - std::sin(xi) / (xi * xi * xi)));
}

DipoleCouplings dipole_couplings(const DipoleChainParams& p) {
    p.validate();
    DipoleCouplings c;
    c.omega = Eigen::MatrixXd::Zero(p.n, p.n);
    c.gamma = Eigen::MatrixXd::Zero(p.n, p.n);
    for (int i = 0; i < p.n; ++i) {
        c.gamma(i, i) = p.gamma;
        for (int j = 0; j < p.n; ++j) {
            if (i == j) continue;
            const double xi = 2.0 * std::numbers::pi * p.d_over_lambda * std::abs(i - j);
            c.omega(i, j) = coupling_omega(xi, p.gamma);
            c.gamma(i, j) = coupling_gamma(xi, p.gamma);
        }
    }
    return c;
}

SystemSpec build_chain_system(const DipoleChainParams& p) {
    p.validate();
    const DipoleCouplings c = dipole_couplings(p);
    SystemSpec sys(p.n);

    OperatorSum h_static = OperatorSum::zero(p.n);
    if (p.omega0 != 0.0)
        for (int i = 1; i <= p.n; ++i)
            h_static += p.omega0 * OperatorSum::sigma22(p.n, i);  // sp*sm = s22
    for (int i = 1; i <= p.n; ++i)
        for (int j = 1; j <= p.n; ++j) {
            if (i == j) continue;
            h_static += c.omega(i - 1, j - 1) * multiply(OperatorSum::sigma_plus(p.n, i),
                                                         OperatorSum::sigma_minus(p.n, j));
        }
    sys.add_hamiltonian(h_static);

    const double eta = p.eta_over_gamma * p.gamma;
    if (eta != 0.0) {
        // t_off is stated in Gamma*t units; the schedule runs in solver time
        const int drive =
            sys.add_handle("drive", CoefficientSchedule::step_window(0.0, p.t_off / p.gamma));
        OperatorSum h_drive = OperatorSum::zero(p.n);
        for (int i = 1; i <= p.n; ++i) h_drive += eta * OperatorSum::sigma_x(p.n, i);
        sys.add_hamiltonian(h_drive, drive);
    }

    sys.add_decay(c.gamma.cast<Complex>());
    sys.validate();
    return sys;
}

namespace {

bool is_prime(long long x) {
    if (x < 2) return false;
    for (long long d = 2; d * d <= x; ++d)
        if (x % d == 0) return false;
    return true;
}

int bit_width(long long x) {
    int w = 0;
    while (x > 0) {
        ++w;
        x >>= 1;
    }
    return w;
}

}  // namespace

BitLayout biprime_bit_layout(long long omega) {
    if (omega <= 1 || omega % 2 == 0)
        throw std::invalid_argument("omega must be an odd integer > 1");
    long long small = 0;
    for (long long d = 3; d * d <= omega; d += 2)
        if (omega % d == 0) {
            small = d;
            break;
        }
    if (small == 0) throw std::invalid_argument("omega is prime, not a bi-prime");
    const long long big = omega / small;
    if (!is_prime(small) || !is_prime(big))
        throw std::invalid_argument("omega is not a product of two primes");

    BitLayout lay;
    lay.a = big;
    lay.b = small;
    lay.k = bit_width(big) - 1;
    lay.l = bit_width(small) - 1;
    lay.n = lay.k + lay.l;
    if (lay.k < (lay.n + 1) / 2 || (lay.n + 1) / 2 <= lay.l)
        throw std::invalid_argument(
            "factor bit widths violate k >= ceil(n/2) > l; ground state would be degenerate");
    return lay;
}

void BiprimeParams::validate() const {
    if (omega <= 1) throw std::invalid_argument("omega must be > 1");
    if (omega % 2 == 0) throw std::invalid_argument("omega must be odd");
    if (t_total <= 0.0) throw std::invalid_argument("t_total must be positive");
    if (hbar_omega <= 0.0) throw std::invalid_argument("hbar_omega must be positive");
    if ((k == 0) != (l == 0))
        throw std::invalid_argument("either give both k and l or neither");
    if (k != 0) {
        const int n = k + l;
        if (k < (n + 1) / 2 || (n + 1) / 2 <= l)
            throw std::invalid_argument("k and l violate k >= ceil(n/2) > l");
    }
}

SystemSpec build_biprime_system(const BiprimeParams& p) {
    p.validate();
    BitLayout lay = biprime_bit_layout(p.omega);
    if (p.k != 0) {
        if (p.k < lay.k || p.l < lay.l)
            throw std::invalid_argument("k or l too small for the factors of omega");
        lay.k = p.k;
        lay.l = p.l;
        lay.n = p.k + p.l;
    }
    const int n = lay.n;
    SystemSpec sys(n);

    const int mixer = sys.add_handle("mixer", CoefficientSchedule::ramp_down(p.t_total));
    const int sweep = sys.add_handle("sweep", CoefficientSchedule::ramp_up(p.t_total));

    OperatorSum h0 = OperatorSum::zero(n);
    for (int m = 1; m <= n; ++m) h0 += (-p.xi) * OperatorSum::sigma_x(n, m);
    sys.add_hamiltonian(h0, mixer);

    // (omega*1 - (1 + sum_i 2^i a_i)(1 + sum_j 2^j b_j))^2 with a_i = s22 on
    // site i, b_j = s22 on site k+j; squaring yields up to four-site terms.
    OperatorSum a_reg = OperatorSum::identity(n);
    for (int i = 1; i <= lay.k; ++i)
        a_reg += static_cast<double>(1LL << i) * OperatorSum::sigma22(n, i);
    OperatorSum b_reg = OperatorSum::identity(n);
    for (int j = 1; j <= lay.l; ++j)
        b_reg += static_cast<double>(1LL << j) * OperatorSum::sigma22(n, lay.k + j);

    OperatorSum defect =
        OperatorSum::identity(n, static_cast<double>(p.omega)) - multiply(a_reg, b_reg);
    OperatorSum h_p = p.hbar_omega * multiply(defect, defect);
    sys.add_hamiltonian(h_p, sweep);

    sys.validate();
    return sys;
}

}  // namespace cem
