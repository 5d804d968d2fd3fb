#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cem/operator_algebra.hpp"

namespace cem {

// Set partition of {0,...,n-1}. Canonical form: blocks ordered by their
// smallest element, elements sorted within each block.
struct Partition {
    std::vector<std::vector<int>> blocks;
    int size() const { return static_cast<int>(blocks.size()); }
};

inline constexpr int kMaxPartitionOrder = 12;

// All set partitions of {0,...,n-1} in canonical form, memoized per n.
// Safe for concurrent lookup. Throws std::out_of_range for n outside
// [1, kMaxPartitionOrder].
const std::vector<Partition>& set_partitions(int n);

// Bell number B_n by the binomial recurrence (independent of the
// enumeration above only in the sense of counting; tests enumerate).
long long bell_number(int n);

// An operator product whose expectation value is taken. Factors follow the
// OperatorTerm canonical form (site-sorted, one factor per site).
struct Moment {
    std::vector<SiteOperator> factors;

    int order() const { return static_cast<int>(factors.size()); }
    std::string key() const { return factors_key(factors); }
    Moment adjointed() const;

    friend auto operator<=>(const Moment&, const Moment&) = default;
};

// coeff * product of moments, with exact integer coefficient. Moments are
// kept sorted so equal monomials compare equal.
struct ExactMonomial {
    long long coeff = 0;
    std::vector<Moment> moments;
};

// Joint cumulant of the factors of m: sum over all partitions p with weight
// (|p|-1)! (-1)^(|p|-1), each block contributing the moment of its factors
// in original relative order.
std::vector<ExactMonomial> joint_cumulant_exact(const Moment& m);

// Moment expansion that closes the hierarchy at `order`: moments of order
// <= `order` pass through, higher ones are rewritten recursively as sums of
// products of lower-order moments (vanishing joint cumulants above `order`).
std::vector<ExactMonomial> expand_moment_exact(const Moment& m, int order);

// Complex-coefficient polynomial over moments, optionally handle-tagged per
// monomial. Canonical: moments sorted within a monomial, monomials sorted
// by (handle, moment keys), merged, exact zeros dropped.
struct Monomial {
    Complex coeff{0.0};
    int handle = kNoHandle;
    std::vector<Moment> moments;  // empty -> constant monomial

    int degree() const { return static_cast<int>(moments.size()); }
};

class MomentPolynomial {
  public:
    MomentPolynomial() = default;
    explicit MomentPolynomial(std::vector<Monomial> monomials);

    void add(Monomial m);
    void add_scaled(const std::vector<ExactMonomial>& exact, Complex scale, int handle);

    const std::vector<Monomial>& monomials() const { return monomials_; }
    bool empty() const { return monomials_.empty(); }
    std::string to_string() const;

  private:
    void canonicalize();
    std::vector<Monomial> monomials_;
};

MomentPolynomial joint_cumulant(const Moment& m);
MomentPolynomial expand_moment(const Moment& m, int order);

}  // namespace cem
