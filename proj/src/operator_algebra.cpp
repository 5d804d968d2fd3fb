#include "cem/operator_algebra.hpp"

#include <algorithm>
#include <stdexcept>

#include "cem/text.hpp"

namespace cem {

const char* op_kind_label(OpKind k) {
    switch (k) {
        case OpKind::SigmaPlus: return "sp";
        case OpKind::SigmaMinus: return "sm";
        case OpKind::Sigma22: return "s22";
    }
    return "?";
}

SiteOperator adjoint(SiteOperator op) {
    switch (op.kind) {
        case OpKind::SigmaPlus: op.kind = OpKind::SigmaMinus; break;
        case OpKind::SigmaMinus: op.kind = OpKind::SigmaPlus; break;
        case OpKind::Sigma22: break;
    }
    return op;
}

namespace {

bool term_order(const OperatorTerm& a, const OperatorTerm& b) {
    if (a.factors != b.factors) return a.factors < b.factors;
    return a.handle < b.handle;
}

void check_site(int n_sites, int site) {
    if (site < 1 || site > n_sites)
        throw std::invalid_argument("site index " + std::to_string(site) +
                                    " outside [1," + std::to_string(n_sites) + "]");
}

}  // namespace

OperatorSum::OperatorSum(int n_sites) : n_sites_(n_sites) {
    if (n_sites < 1) throw std::invalid_argument("system needs at least one site");
}

OperatorSum OperatorSum::zero(int n_sites) { return OperatorSum(n_sites); }

OperatorSum OperatorSum::identity(int n_sites, Complex c) {
    OperatorSum s(n_sites);
    if (c != 0.0) s.terms_.push_back({c, kNoHandle, {}});
    return s;
}

OperatorSum OperatorSum::from_term(int n_sites, OperatorTerm term) {
    OperatorSum s(n_sites);
    for (std::size_t i = 0; i < term.factors.size(); ++i) {
        check_site(n_sites, term.factors[i].site);
        if (i > 0 && term.factors[i].site <= term.factors[i - 1].site)
            throw std::invalid_argument("term factors must have strictly increasing sites");
    }
    if (term.coeff != 0.0) s.terms_.push_back(std::move(term));
    return s;
}

OperatorSum OperatorSum::sigma_plus(int n_sites, int site) {
    check_site(n_sites, site);
    return from_term(n_sites, {Complex(1.0), kNoHandle, {{site, OpKind::SigmaPlus}}});
}

OperatorSum OperatorSum::sigma_minus(int n_sites, int site) {
    check_site(n_sites, site);
    return from_term(n_sites, {Complex(1.0), kNoHandle, {{site, OpKind::SigmaMinus}}});
}

OperatorSum OperatorSum::sigma22(int n_sites, int site) {
    check_site(n_sites, site);
    return from_term(n_sites, {Complex(1.0), kNoHandle, {{site, OpKind::Sigma22}}});
}

OperatorSum OperatorSum::sigma_x(int n_sites, int site) {
    return sigma_plus(n_sites, site) + sigma_minus(n_sites, site);
}

OperatorSum OperatorSum::sigma_z(int n_sites, int site) {
    return 2.0 * sigma22(n_sites, site) - identity(n_sites);
}

void OperatorSum::canonicalize() {
    std::sort(terms_.begin(), terms_.end(), term_order);
    std::vector<OperatorTerm> merged;
    merged.reserve(terms_.size());
    for (auto& t : terms_) {
        if (!merged.empty() && merged.back().factors == t.factors &&
            merged.back().handle == t.handle) {
            merged.back().coeff += t.coeff;
        } else {
            merged.push_back(std::move(t));
        }
    }
    std::erase_if(merged, [](const OperatorTerm& t) { return t.coeff == 0.0; });
    terms_ = std::move(merged);
}

OperatorSum& OperatorSum::operator+=(const OperatorSum& rhs) {
    if (n_sites_ == 0) n_sites_ = rhs.n_sites_;
    if (n_sites_ != rhs.n_sites_)
        throw std::invalid_argument("operator sums act on different system sizes");
    terms_.insert(terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
    canonicalize();
    return *this;
}

OperatorSum& OperatorSum::operator-=(const OperatorSum& rhs) {
    OperatorSum neg = rhs;
    neg *= Complex(-1.0);
    return *this += neg;
}

OperatorSum& OperatorSum::operator*=(Complex c) {
    if (c == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) t.coeff *= c;
    return *this;
}

OperatorSum& OperatorSum::tag_handle(int handle) {
    for (auto& t : terms_) {
        if (t.handle != kNoHandle)
            throw std::invalid_argument("term already carries a time-coefficient handle");
        t.handle = handle;
    }
    canonicalize();
    return *this;
}

OperatorSum operator+(OperatorSum a, const OperatorSum& b) { return a += b; }
OperatorSum operator-(OperatorSum a, const OperatorSum& b) { return a -= b; }
OperatorSum operator*(Complex c, OperatorSum s) { return s *= c; }
OperatorSum operator*(double c, OperatorSum s) { return s *= Complex(c); }

bool operator==(const OperatorSum& a, const OperatorSum& b) {
    if (a.n_sites_ != b.n_sites_) return false;
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
        const auto& x = a.terms_[i];
        const auto& y = b.terms_[i];
        if (x.coeff != y.coeff || x.handle != y.handle || x.factors != y.factors) return false;
    }
    return true;
}

namespace {

// sigma^{ab} sigma^{cd} = delta_{bc} sigma^{ad} on one site. Outcomes:
// zero, a single operator, or |g><g| which expands to identity - s22.
enum class ContractionKind { Zero, Single, IdentityMinusS22 };

struct Contraction {
    ContractionKind kind;
    OpKind op;  // valid when kind == Single
};

Contraction contract(OpKind left, OpKind right) {
    auto pair = [](OpKind k) -> std::pair<int, int> {
        switch (k) {
            case OpKind::SigmaPlus: return {2, 1};
            case OpKind::SigmaMinus: return {1, 2};
            case OpKind::Sigma22: return {2, 2};
        }
        return {0, 0};
    };
    auto [a, b] = pair(left);
    auto [c, d] = pair(right);
    if (b != c) return {ContractionKind::Zero, OpKind::Sigma22};
    if (a == 1 && d == 1) return {ContractionKind::IdentityMinusS22, OpKind::Sigma22};
    if (a == 2 && d == 1) return {ContractionKind::Single, OpKind::SigmaPlus};
    if (a == 1 && d == 2) return {ContractionKind::Single, OpKind::SigmaMinus};
    return {ContractionKind::Single, OpKind::Sigma22};
}

// Merge the factor lists of a*b site by site, branching on the
// identity-minus-s22 outcome. Appends the reduced terms to `out`.
void multiply_terms(const OperatorTerm& a, const OperatorTerm& b,
                    std::vector<OperatorTerm>& out) {
    if (a.handle != kNoHandle && b.handle != kNoHandle)
        throw std::invalid_argument("product of two handle-tagged terms is not supported");
    const int handle = a.handle != kNoHandle ? a.handle : b.handle;

    struct Partial {
        Complex coeff;
        std::size_t ia, ib;
        std::vector<SiteOperator> factors;
    };
    std::vector<Partial> stack;
    stack.push_back({a.coeff * b.coeff, 0, 0, {}});

    while (!stack.empty()) {
        Partial p = std::move(stack.back());
        stack.pop_back();
        bool dead = false;
        while (p.ia < a.factors.size() || p.ib < b.factors.size()) {
            if (p.ib == b.factors.size() ||
                (p.ia < a.factors.size() && a.factors[p.ia].site < b.factors[p.ib].site)) {
                p.factors.push_back(a.factors[p.ia++]);
            } else if (p.ia == a.factors.size() ||
                       b.factors[p.ib].site < a.factors[p.ia].site) {
                p.factors.push_back(b.factors[p.ib++]);
            } else {
                const int site = a.factors[p.ia].site;
                Contraction c = contract(a.factors[p.ia].kind, b.factors[p.ib].kind);
                ++p.ia;
                ++p.ib;
                if (c.kind == ContractionKind::Zero) {
                    dead = true;
                    break;
                }
                if (c.kind == ContractionKind::Single) {
                    p.factors.push_back({site, c.op});
                } else {
                    // identity branch continues below; s22 branch forked
                    Partial fork = p;
                    fork.coeff = -p.coeff;
                    fork.factors.push_back({site, OpKind::Sigma22});
                    stack.push_back(std::move(fork));
                }
            }
        }
        if (!dead) out.push_back({p.coeff, handle, std::move(p.factors)});
    }
}

}  // namespace

OperatorSum multiply(const OperatorSum& a, const OperatorSum& b) {
    if (a.n_sites() != b.n_sites())
        throw std::invalid_argument("operator sums act on different system sizes");
    OperatorSum out(a.n_sites());
    for (const auto& ta : a.terms())
        for (const auto& tb : b.terms()) multiply_terms(ta, tb, out.terms_);
    out.canonicalize();
    return out;
}

OperatorSum commutator(const OperatorSum& a, const OperatorSum& b) {
    return multiply(a, b) - multiply(b, a);
}

OperatorSum anticommutator(const OperatorSum& a, const OperatorSum& b) {
    return multiply(a, b) + multiply(b, a);
}

OperatorSum adjoint(const OperatorSum& s) {
    // Distinct-site factors commute, so mapping kinds in place keeps the
    // site-sorted canonical order.
    OperatorSum out(s.n_sites());
    for (auto t : s.terms()) {
        t.coeff = std::conj(t.coeff);
        for (auto& f : t.factors) f = adjoint(f);
        out += OperatorSum::from_term(s.n_sites(), std::move(t));
    }
    return out;
}

std::string factors_key(const std::vector<SiteOperator>& factors) {
    if (factors.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) s += "*";
        s += op_kind_label(factors[i].kind);
        s += "[" + std::to_string(factors[i].site) + "]";
    }
    return s;
}

std::string to_string(const OperatorTerm& t) {
    std::string s = pretty_complex(t.coeff);
    if (t.handle != kNoHandle) s += "*{h" + std::to_string(t.handle) + "}";
    if (!t.factors.empty()) s += "*" + factors_key(t.factors);
    return s;
}

std::string to_string(const OperatorSum& s) {
    if (s.is_zero()) return "0";
    std::string out;
    for (std::size_t i = 0; i < s.terms().size(); ++i) {
        if (i) out += " + ";
        out += to_string(s.terms()[i]);
    }
    return out;
}

}  // namespace cem
