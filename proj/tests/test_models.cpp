#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cem/dense.hpp"
#include "cem/models.hpp"

using namespace cem;

TEST_CASE("coupling values at half-wavelength spacing") {
    DipoleChainParams p;
    p.n = 2;
    p.d_over_lambda = 0.5;
    const auto c = dipole_couplings(p);

    const double pi = std::numbers::pi;
    CHECK(c.gamma(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.gamma(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
    // xi = pi: Gamma_12 = (3/2)(0 + (-1/pi^2 - 0)) = -3/(2 pi^2)
    CHECK(c.gamma(0, 1) == doctest::Approx(-1.5 / (pi * pi)).epsilon(1e-12));
    CHECK(c.gamma(0, 1) == doctest::Approx(-0.15198).epsilon(1e-4));
    // Omega_12 = (3/4)(1/pi - 1/pi^3)
    CHECK(c.omega(0, 1) == doctest::Approx(0.75 * (1 / pi - 1 / (pi * pi * pi))).epsilon(1e-12));
    CHECK(c.omega(0, 0) == 0.0);
}

TEST_CASE("couplings tend to Gamma and zero in the near and far limits") {
    // small-xi Taylor series: Gamma(xi) = Gamma (1 - xi^2/5 + O(xi^4))
    const double xi = 1e-3;
    const double series = 1.0 - xi * xi / 5.0;
    CHECK(std::abs(coupling_gamma(xi, 1.0) - series) < 1e-9);
    CHECK(coupling_gamma(xi, 1.0) == doctest::Approx(1.0).epsilon(1e-5));

    // far field decouples
    CHECK(std::abs(coupling_gamma(2e3 * std::numbers::pi, 1.0)) < 1e-3);
    CHECK(std::abs(coupling_omega(2e3 * std::numbers::pi, 1.0)) < 1e-3);
}

TEST_CASE("coupling matrices are symmetric Toeplitz") {
    DipoleChainParams p;
    p.n = 6;
    p.d_over_lambda = 0.1;
    const auto c = dipole_couplings(p);
    for (int i = 0; i < p.n; ++i)
        for (int j = 0; j < p.n; ++j) {
            CHECK(c.omega(i, j) == c.omega(j, i));
            CHECK(c.gamma(i, j) == c.gamma(j, i));
            if (i > 0 && j > 0) {
                CHECK(c.omega(i, j) == c.omega(i - 1, j - 1));
                CHECK(c.gamma(i, j) == c.gamma(i - 1, j - 1));
            }
        }
    DipoleChainParams bad = p;
    bad.d_over_lambda = 0.0;
    CHECK_THROWS_AS(dipole_couplings(bad), std::invalid_argument);
}

TEST_CASE("chain system structure") {
    DipoleChainParams p;
    p.n = 2;
    p.d_over_lambda = 0.5;
    p.eta_over_gamma = 2.0;
    SystemSpec sys = build_chain_system(p);
    REQUIRE(sys.dissipators.size() == 1);
    CHECK(sys.dissipators[0].gamma(0, 0) == Complex(1.0));

    // exactly one symmetric hopping pair plus four drive terms
    int hopping = 0, drive = 0;
    for (const auto& t : sys.hamiltonian.terms()) {
        if (t.handle == kNoHandle) {
            ++hopping;
            CHECK(t.factors.size() == 2);
        } else {
            ++drive;
            CHECK(t.factors.size() == 1);
        }
    }
    CHECK(hopping == 2);
    CHECK(drive == 4);

    // drive schedule: eta before t_off, zero after
    REQUIRE(sys.handles.size() == 1);
    CHECK(sys.handles[0].eval(4.999) == 1.0);
    CHECK(sys.handles[0].eval(5.001) == 0.0);

    // N=1 reduces to the driven damped two-level system
    DipoleChainParams single;
    single.n = 1;
    single.eta_over_gamma = 2.0;
    SystemSpec one = build_chain_system(single);
    for (const auto& t : one.hamiltonian.terms()) CHECK(t.factors.size() == 1);
    CHECK(one.dissipators[0].gamma.rows() == 1);
}

TEST_CASE("bit layouts of the paper's bi-primes") {
    auto l21 = biprime_bit_layout(21);
    CHECK(l21.k == 2);
    CHECK(l21.l == 1);
    CHECK(l21.n == 3);
    CHECK(l21.a == 7);
    CHECK(l21.b == 3);

    auto l15 = biprime_bit_layout(15);
    CHECK(l15.k == 2);
    CHECK(l15.l == 1);
    CHECK(l15.n == 3);
    CHECK(l15.a == 5);

    auto l33 = biprime_bit_layout(33);
    CHECK(l33.n == 4);
    CHECK(l33.k == 3);
    CHECK(l33.l == 1);

    CHECK(biprime_bit_layout(85).n == 6);

    CHECK_THROWS_AS(biprime_bit_layout(16), std::invalid_argument);  // even
    CHECK_THROWS_AS(biprime_bit_layout(17), std::invalid_argument);  // prime
    CHECK_THROWS_AS(biprime_bit_layout(27), std::invalid_argument);  // three factors
    CHECK_THROWS_AS(biprime_bit_layout(35), std::invalid_argument);  // equal widths
    CHECK_THROWS_AS(biprime_bit_layout(9), std::invalid_argument);   // square
}

TEST_CASE("cost Hamiltonian is diagonal, PSD, with the factorization ground state") {
    for (long long omega : {21LL, 15LL, 33LL, 85LL}) {
        CAPTURE(omega);
        BiprimeParams p;
        p.omega = omega;
        SystemSpec sys = build_biprime_system(p);
        const BitLayout lay = biprime_bit_layout(omega);

        // the swept part is the cost Hamiltonian: s22 factors only
        OperatorSum h_p = OperatorSum::zero(lay.n);
        for (const auto& t : sys.hamiltonian.terms()) {
            if (sys.handle_names[t.handle] != "sweep") continue;
            for (const auto& f : t.factors) CHECK(f.kind == OpKind::Sigma22);
            CHECK(t.factors.size() <= 4);
            OperatorTerm plain = t;
            plain.handle = kNoHandle;
            h_p += OperatorSum::from_term(lay.n, plain);
        }

        const Eigen::MatrixXcd m = to_matrix(h_p);
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        // diagonal in the computational basis
        Eigen::MatrixXcd off = m;
        off.diagonal().setZero();
        CHECK(off.cwiseAbs().maxCoeff() < 1e-12);

        // eigenvalue zero exactly on the factorization state, positive
        // elsewhere, unique ground state
        int zero_count = 0;
        long expect_idx = 0;
        for (int i = 1; i <= lay.k; ++i)
            if ((lay.a >> i) & 1) expect_idx |= 1L << (i - 1);
        for (int j = 1; j <= lay.l; ++j)
            if ((lay.b >> j) & 1) expect_idx |= 1L << (lay.k + j - 1);
        for (long idx = 0; idx < m.rows(); ++idx) {
            const double e = m(idx, idx).real();
            if (std::abs(e) < 1e-9) {
                ++zero_count;
                CHECK(idx == expect_idx);
            } else {
                CHECK(e > 0.0);
            }
        }
        CHECK(zero_count == 1);
    }
}

TEST_CASE("annealer schedule endpoints") {
    BiprimeParams p;
    p.omega = 21;
    SystemSpec sys = build_biprime_system(p);
    REQUIRE(sys.handles.size() == 2);
    const auto& mixer = sys.handles[0];
    const auto& sweep = sys.handles[1];
    CHECK(mixer.eval(0.0) == 1.0);
    CHECK(mixer.eval(p.t_total) == 0.0);
    CHECK(sweep.eval(0.0) == 0.0);
    CHECK(sweep.eval(p.t_total) == 1.0);

    BiprimeParams bad = p;
    bad.omega = 33;
    bad.k = 2;
    bad.l = 2;
    CHECK_THROWS_AS(build_biprime_system(bad), std::invalid_argument);
}

TEST_CASE("cost function zeros for omega = 21 and 15") {
    // (21 - 7*3)^2 = 0 via the a,b register values
    auto check_zero = [](long long omega, long long a, long long b) {
        CHECK((omega - a * b) == 0);
    };
    check_zero(21, 7, 3);
    check_zero(15, 5, 3);
}
