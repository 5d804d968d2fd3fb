#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace cem {

using Complex = std::complex<double>;

// Terms whose coefficient is multiplied by a named scalar function of time
// carry a handle index into the owning system's schedule table. kNoHandle
// means the coefficient is a plain constant.
inline constexpr int kNoHandle = -1;

// Per-site transition operators on a two-level system. SigmaPlus = |e><g|,
// SigmaMinus = |g><e|, Sigma22 = |e><e|. The fourth transition |g><g| is
// never stored; it is rewritten as identity - Sigma22 on construction.
enum class OpKind : std::uint8_t { SigmaPlus = 0, SigmaMinus = 1, Sigma22 = 2 };

const char* op_kind_label(OpKind k);  // "sp", "sm", "s22"

struct SiteOperator {
    int site = 1;  // 1-based
    OpKind kind = OpKind::Sigma22;

    friend auto operator<=>(const SiteOperator&, const SiteOperator&) = default;
};

SiteOperator adjoint(SiteOperator op);

// One product term: coefficient (optionally tagged with a time-coefficient
// handle) times factors sorted by strictly increasing site index.
struct OperatorTerm {
    Complex coeff{1.0, 0.0};
    int handle = kNoHandle;
    std::vector<SiteOperator> factors;

    int order() const { return static_cast<int>(factors.size()); }
};

// Linear combination of product terms in canonical form: terms sorted by
// (factors, handle), like terms merged, exact-zero coefficients dropped.
class OperatorSum {
  public:
    OperatorSum() = default;
    explicit OperatorSum(int n_sites);

    static OperatorSum zero(int n_sites);
    static OperatorSum identity(int n_sites, Complex c = 1.0);
    static OperatorSum sigma_plus(int n_sites, int site);
    static OperatorSum sigma_minus(int n_sites, int site);
    static OperatorSum sigma22(int n_sites, int site);
    static OperatorSum sigma_x(int n_sites, int site);  // sp + sm
    static OperatorSum sigma_z(int n_sites, int site);  // 2*s22 - 1
    static OperatorSum from_term(int n_sites, OperatorTerm term);

    int n_sites() const { return n_sites_; }
    const std::vector<OperatorTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    OperatorSum& operator+=(const OperatorSum& rhs);
    OperatorSum& operator-=(const OperatorSum& rhs);
    OperatorSum& operator*=(Complex c);

    // Attach a handle to every term. Terms must be handle-free beforehand.
    OperatorSum& tag_handle(int handle);

    friend bool operator==(const OperatorSum& a, const OperatorSum& b);

  private:
    friend OperatorSum multiply(const OperatorSum&, const OperatorSum&);
    void canonicalize();

    int n_sites_ = 0;
    std::vector<OperatorTerm> terms_;
};

OperatorSum operator+(OperatorSum a, const OperatorSum& b);
OperatorSum operator-(OperatorSum a, const OperatorSum& b);
OperatorSum operator*(Complex c, OperatorSum s);
OperatorSum operator*(double c, OperatorSum s);

// Fully reduced product. Distributes over sums; same-site factors contract
// via the transition rule sigma^{ab} sigma^{cd} = delta_{bc} sigma^{ad}.
// Throws std::invalid_argument when the operands disagree on system size.
OperatorSum multiply(const OperatorSum& a, const OperatorSum& b);
OperatorSum commutator(const OperatorSum& a, const OperatorSum& b);
OperatorSum anticommutator(const OperatorSum& a, const OperatorSum& b);
OperatorSum adjoint(const OperatorSum& s);

// Stable debug rendering, e.g. "(0.5+0i)*s22[1]*sp[2]". Empty sum -> "0",
// handle-tagged terms carry "{h<idx>}" after the coefficient.
std::string to_string(const OperatorTerm& t);
std::string to_string(const OperatorSum& s);

// Key string of a factor list ("s22[1]*sp[2]", identity -> "1").
std::string factors_key(const std::vector<SiteOperator>& factors);

}  // namespace cem
