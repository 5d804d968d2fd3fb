#include <doctest.h>

#include <random>

#include "cem/dense.hpp"
#include "cem/operator_algebra.hpp"

using namespace cem;

namespace {

double matrix_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

OperatorSum random_sum(std::mt19937& rng, int n_sites, int max_terms = 4) {
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<int> kind(0, 2);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    OperatorSum s = OperatorSum::zero(n_sites);
    const int terms = nterms(rng);
    for (int t = 0; t < terms; ++t) {
        OperatorTerm term;
        term.coeff = {coeff(rng), coeff(rng)};
        for (int site = 1; site <= n_sites; ++site)
            if (coin(rng)) term.factors.push_back({site, static_cast<OpKind>(kind(rng))});
        s += OperatorSum::from_term(n_sites, term);
    }
    return s;
}

}  // namespace

TEST_CASE("same-site contraction table") {
    const int n = 2;
    auto sp1 = OperatorSum::sigma_plus(n, 1);
    auto sm1 = OperatorSum::sigma_minus(n, 1);
    auto s22_1 = OperatorSum::sigma22(n, 1);

    CHECK(multiply(sp1, sm1) == s22_1);
    CHECK(multiply(s22_1, s22_1) == s22_1);
    CHECK(multiply(sp1, sp1).is_zero());
    CHECK(multiply(sm1, sp1) == OperatorSum::identity(n) - s22_1);

    // distinct sites commute; factors reorder into site order
    auto prod = multiply(OperatorSum::sigma_minus(n, 2), OperatorSum::sigma_plus(n, 1));
    REQUIRE(prod.terms().size() == 1);
    CHECK(prod.terms()[0].factors ==
          std::vector<SiteOperator>{{1, OpKind::SigmaPlus}, {2, OpKind::SigmaMinus}});
    CHECK(prod == multiply(OperatorSum::sigma_plus(n, 1), OperatorSum::sigma_minus(n, 2)));
}

TEST_CASE("commutators of basis operators") {
    const int n = 2;
    auto sp1 = OperatorSum::sigma_plus(n, 1);
    auto sm1 = OperatorSum::sigma_minus(n, 1);
    CHECK(commutator(sp1, sm1) == OperatorSum::sigma_z(n, 1));
    CHECK(commutator(OperatorSum::sigma22(n, 1), OperatorSum::sigma22(n, 2)).is_zero());

    // [sx_1, s22_1] checked against the one-site matrix algebra
    auto lhs = commutator(OperatorSum::sigma_x(1, 1), OperatorSum::sigma22(1, 1));
    auto expect = OperatorSum::sigma_minus(1, 1) - OperatorSum::sigma_plus(1, 1);
    CHECK(lhs == expect);
    CHECK(matrix_distance(to_matrix(lhs),
                          to_matrix(OperatorSum::sigma_x(1, 1)) *
                                  to_matrix(OperatorSum::sigma22(1, 1)) -
                              to_matrix(OperatorSum::sigma22(1, 1)) *
                                  to_matrix(OperatorSum::sigma_x(1, 1))) < 1e-12);
}

TEST_CASE("adjoint basics") {
    const int n = 2;
    CHECK(adjoint(OperatorSum::sigma_plus(n, 1)) == OperatorSum::sigma_minus(n, 1));
    CHECK(adjoint(OperatorSum::sigma_x(n, 1)) == OperatorSum::sigma_x(n, 1));

    auto t = OperatorSum::from_term(
        n, {Complex(0, 2), kNoHandle, {{1, OpKind::Sigma22}, {2, OpKind::SigmaPlus}}});
    auto expect = OperatorSum::from_term(
        n, {Complex(0, -2), kNoHandle, {{1, OpKind::Sigma22}, {2, OpKind::SigmaMinus}}});
    CHECK(adjoint(t) == expect);
}

TEST_CASE("mismatched system sizes are structural errors") {
    CHECK_THROWS_AS(multiply(OperatorSum::sigma22(2, 1), OperatorSum::sigma22(3, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(OperatorSum::sigma22(2, 3), std::invalid_argument);
    CHECK_THROWS_AS(
        OperatorSum::from_term(3, {Complex(1.0),
                                   kNoHandle,
                                   {{2, OpKind::Sigma22}, {2, OpKind::SigmaPlus}}}),
        std::invalid_argument);
}

TEST_CASE("matrix oracle: multiply, commutator, adjoint on random sums") {
    std::mt19937 rng(991);
    for (int n = 1; n <= 4; ++n) {
        for (int trial = 0; trial < 60; ++trial) {
            auto a = random_sum(rng, n);
            auto b = random_sum(rng, n);
            const auto ma = to_matrix(a), mb = to_matrix(b);
            CHECK(matrix_distance(to_matrix(multiply(a, b)), ma * mb) < 1e-12);
            CHECK(matrix_distance(to_matrix(commutator(a, b)), ma * mb - mb * ma) < 1e-12);
            CHECK(matrix_distance(to_matrix(adjoint(a)), ma.adjoint()) < 1e-12);
            CHECK(matrix_distance(to_matrix(a + b), ma + mb) < 1e-12);
            CHECK(adjoint(adjoint(a)) == a);
        }
    }
}

TEST_CASE("associativity and distributivity") {
    std::mt19937 rng(1723);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 4;
        auto a = random_sum(rng, n, 3);
        auto b = random_sum(rng, n, 3);
        auto c = random_sum(rng, n, 3);
        const auto ma = to_matrix(a), mb = to_matrix(b), mc = to_matrix(c);
        auto abc_left = multiply(multiply(a, b), c);
        auto abc_right = multiply(a, multiply(b, c));
        CHECK(matrix_distance(to_matrix(abc_left), ma * mb * mc) < 1e-11);
        CHECK(matrix_distance(to_matrix(abc_left), to_matrix(abc_right)) < 1e-11);
        CHECK(matrix_distance(to_matrix(multiply(a, b + c)),
                              to_matrix(multiply(a, b) + multiply(a, c))) < 1e-11);
    }
}

TEST_CASE("canonical form is unique for equal operators") {
    std::mt19937 rng(55);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + trial % 3;
        auto a = random_sum(rng, n);
        // same operator assembled differently: multiplied by identity and
        // rebuilt from shuffled terms
        auto b = multiply(a, OperatorSum::identity(n));
        CHECK(a == b);
        std::vector<OperatorTerm> shuffled(a.terms().begin(), a.terms().end());
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        auto c = OperatorSum::zero(n);
        for (const auto& t : shuffled) c += OperatorSum::from_term(n, t);
        CHECK(a == c);
    }
}

TEST_CASE("debug rendering is stable") {
    const int n = 2;
    auto s = OperatorSum::from_term(
        n, {Complex(0.5, 0), kNoHandle, {{1, OpKind::Sigma22}, {2, OpKind::SigmaPlus}}});
    CHECK(to_string(s) == "(0.5+0i)*s22[1]*sp[2]");
    CHECK(to_string(OperatorSum::zero(n)) == "0");
    CHECK(to_string(OperatorSum::sigma_z(n, 1)) == "(-1+0i) + (2+0i)*s22[1]");
}
