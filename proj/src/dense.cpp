#include "cem/dense.hpp"

#include <stdexcept>

namespace cem {

Eigen::Matrix2cd site_matrix(OpKind k) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    switch (k) {
        case OpKind::SigmaPlus: m(1, 0) = 1.0; break;   // |e><g|
        case OpKind::SigmaMinus: m(0, 1) = 1.0; break;  // |g><e|
        case OpKind::Sigma22: m(1, 1) = 1.0; break;     // |e><e|
    }
    return m;
}

Eigen::MatrixXcd to_matrix(const OperatorSum& s, const std::vector<double>* handle_values) {
    const int n = s.n_sites();
    if (n > 20) throw std::invalid_argument("dense representation limited to 20 sites");
    const long dim = 1L << n;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);

    for (const auto& term : s.terms()) {
        Complex c = term.coeff;
        if (term.handle != kNoHandle) {
            if (!handle_values)
                throw std::invalid_argument("handle-tagged term but no handle values given");
            c *= (*handle_values)[term.handle];
        }
        // Each factor acts on one bit; absent sites are identity, so the
        // term connects exactly the index pairs that agree off-site.
        for (long col = 0; col < dim; ++col) {
            long row = col;
            Complex v = c;
            bool dead = false;
            for (const auto& f : term.factors) {
                const long bit = 1L << (f.site - 1);
                const int in = (col & bit) ? 1 : 0;
                const Eigen::Matrix2cd m = site_matrix(f.kind);
                // one nonzero entry per column of every site matrix
                int outbit;
                Complex entry;
                if (m(0, in) != 0.0) {
                    outbit = 0;
                    entry = m(0, in);
                } else if (m(1, in) != 0.0) {
                    outbit = 1;
                    entry = m(1, in);
                } else {
                    dead = true;
                    break;
                }
                v *= entry;
                row = outbit ? (row | bit) : (row & ~bit);
            }
            if (!dead) out(row, col) += v;
        }
    }
    return out;
}

Eigen::VectorXcd product_state_vector(const std::vector<Eigen::Vector2cd>& sites) {
    const int n = static_cast<int>(sites.size());
    const long dim = 1L << n;
    Eigen::VectorXcd psi(dim);
    for (long idx = 0; idx < dim; ++idx) {
        Complex amp = 1.0;
        for (int m = 0; m < n; ++m) amp *= sites[m]((idx >> m) & 1);
        psi(idx) = amp;
    }
    return psi;
}

}  // namespace cem
