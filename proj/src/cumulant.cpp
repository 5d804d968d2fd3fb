#include "cem/cumulant.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <stdexcept>

#include "cem/text.hpp"

namespace cem {

namespace {

std::vector<Partition> enumerate(int n) {
    // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
    // Block indices are first-occurrence ordered, which is exactly the
    // canonical block order.
    std::vector<Partition> out;
    std::vector<int> a(n, 0);
    while (true) {
        int nblocks = *std::max_element(a.begin(), a.end()) + 1;
        Partition p;
        p.blocks.assign(nblocks, {});
        for (int i = 0; i < n; ++i) p.blocks[a[i]].push_back(i);
        out.push_back(std::move(p));

        int i = n - 1;
        for (; i > 0; --i) {
            int mx = 0;
            for (int j = 0; j < i; ++j) mx = std::max(mx, a[j]);
            if (a[i] <= mx) break;
        }
        if (i == 0) break;
        ++a[i];
        std::fill(a.begin() + i + 1, a.end(), 0);
    }
    return out;
}

std::array<std::vector<Partition>, kMaxPartitionOrder + 1> g_partitions;
std::array<std::once_flag, kMaxPartitionOrder + 1> g_partition_flags;

long long factorial(int n) {
    long long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

Moment block_moment(const Moment& m, const std::vector<int>& block) {
    Moment out;
    out.factors.reserve(block.size());
    for (int i : block) out.factors.push_back(m.factors[i]);
    return out;
}

void append_product(std::vector<ExactMonomial>& out, long long coeff,
                    const std::vector<std::vector<ExactMonomial>>& factors,
                    std::vector<Moment>& acc, std::size_t at) {
    if (at == factors.size()) {
        ExactMonomial mono;
        mono.coeff = coeff;
        mono.moments = acc;
        std::sort(mono.moments.begin(), mono.moments.end());
        out.push_back(std::move(mono));
        return;
    }
    for (const auto& m : factors[at]) {
        std::size_t base = acc.size();
        acc.insert(acc.end(), m.moments.begin(), m.moments.end());
        append_product(out, coeff * m.coeff, factors, acc, at + 1);
        acc.resize(base);
    }
}

void merge_exact(std::vector<ExactMonomial>& monomials) {
    std::sort(monomials.begin(), monomials.end(),
              [](const ExactMonomial& a, const ExactMonomial& b) { return a.moments < b.moments; });
    std::vector<ExactMonomial> merged;
    for (auto& m : monomials) {
        if (!merged.empty() && merged.back().moments == m.moments)
            merged.back().coeff += m.coeff;
        else
            merged.push_back(std::move(m));
    }
    std::erase_if(merged, [](const ExactMonomial& m) { return m.coeff == 0; });
    monomials = std::move(merged);
}

}  // namespace

const std::vector<Partition>& set_partitions(int n) {
    if (n < 1 || n > kMaxPartitionOrder)
        throw std::out_of_range("set_partitions: n must be in [1," +
                                std::to_string(kMaxPartitionOrder) + "]");
    std::call_once(g_partition_flags[n], [n] { g_partitions[n] = enumerate(n); });
    return g_partitions[n];
}

long long bell_number(int n) {
    if (n < 0 || n > kMaxPartitionOrder + 3) throw std::out_of_range("bell_number");
    // B_{k+1} = sum_j C(k,j) B_j
    std::vector<long long> bell{1};  // B_0
    for (int k = 0; k < n; ++k) {
        long long next = 0, binom = 1;
        for (int j = 0; j <= k; ++j) {
            next += binom * bell[j];
            binom = binom * (k - j) / (j + 1);
        }
        bell.push_back(next);
    }
    return bell[n];
}

Moment Moment::adjointed() const {
    Moment out = *this;
    for (auto& f : out.factors) f = adjoint(f);
    return out;
}

std::vector<ExactMonomial> joint_cumulant_exact(const Moment& m) {
    const int n = m.order();
    std::vector<ExactMonomial> out;
    for (const auto& p : set_partitions(n)) {
        long long coeff = factorial(p.size() - 1);
        if ((p.size() - 1) % 2 != 0) coeff = -coeff;
        ExactMonomial mono;
        mono.coeff = coeff;
        for (const auto& b : p.blocks) mono.moments.push_back(block_moment(m, b));
        std::sort(mono.moments.begin(), mono.moments.end());
        out.push_back(std::move(mono));
    }
    merge_exact(out);
    return out;
}

std::vector<ExactMonomial> expand_moment_exact(const Moment& m, int order) {
    if (order < 1) throw std::out_of_range("expand_moment: order must be >= 1");
    const int n = m.order();
    if (n > kMaxPartitionOrder)
        throw std::out_of_range("expand_moment: moment order exceeds " +
                                std::to_string(kMaxPartitionOrder));
    if (n <= order) return {{1, {m}}};

    // One application over all partitions except the trivial {I}; every
    // block then has order <= n-1, recurse on blocks still above `order`.
    std::vector<ExactMonomial> out;
    for (const auto& p : set_partitions(n)) {
        if (p.size() == 1) continue;
        long long coeff = factorial(p.size() - 1);
        if (p.size() % 2 != 0) coeff = -coeff;
        std::vector<std::vector<ExactMonomial>> factors;
        factors.reserve(p.blocks.size());
        for (const auto& b : p.blocks)
            factors.push_back(expand_moment_exact(block_moment(m, b), order));
        std::vector<Moment> acc;
        append_product(out, coeff, factors, acc, 0);
    }
    merge_exact(out);
    return out;
}

MomentPolynomial::MomentPolynomial(std::vector<Monomial> monomials)
    : monomials_(std::move(monomials)) {
    for (auto& m : monomials_) std::sort(m.moments.begin(), m.moments.end());
    canonicalize();
}

void MomentPolynomial::add(Monomial m) {
    if (m.coeff == 0.0) return;
    std::sort(m.moments.begin(), m.moments.end());
    monomials_.push_back(std::move(m));
    canonicalize();
}

void MomentPolynomial::add_scaled(const std::vector<ExactMonomial>& exact, Complex scale,
                                  int handle) {
    if (scale == 0.0) return;
    for (const auto& e : exact) {
        Monomial m;
        m.coeff = scale * static_cast<double>(e.coeff);
        m.handle = handle;
        m.moments = e.moments;
        monomials_.push_back(std::move(m));
    }
    canonicalize();
}

void MomentPolynomial::canonicalize() {
    auto less = [](const Monomial& a, const Monomial& b) {
        if (a.handle != b.handle) return a.handle < b.handle;
        return a.moments < b.moments;
    };
    std::sort(monomials_.begin(), monomials_.end(), less);
    std::vector<Monomial> merged;
    for (auto& m : monomials_) {
        if (!merged.empty() && merged.back().handle == m.handle &&
            merged.back().moments == m.moments)
            merged.back().coeff += m.coeff;
        else
            merged.push_back(std::move(m));
    }
    std::erase_if(merged, [](const Monomial& m) { return m.coeff == 0.0; });
    monomials_ = std::move(merged);
}

std::string MomentPolynomial::to_string() const {
    if (monomials_.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < monomials_.size(); ++i) {
        const auto& m = monomials_[i];
        if (i) out += " + ";
        out += pretty_complex(m.coeff);
        if (m.handle != kNoHandle) out += "*{h" + std::to_string(m.handle) + "}";
        for (const auto& mm : m.moments) out += "*<" + mm.key() + ">";
    }
    return out;
}

MomentPolynomial joint_cumulant(const Moment& m) {
    MomentPolynomial p;
    p.add_scaled(joint_cumulant_exact(m), Complex(1.0), kNoHandle);
    return p;
}

MomentPolynomial expand_moment(const Moment& m, int order) {
    MomentPolynomial p;
    p.add_scaled(expand_moment_exact(m, order), Complex(1.0), kNoHandle);
    return p;
}

}  // namespace cem
