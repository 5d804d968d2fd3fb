#include "cem/eom.hpp"

#include <omp.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cem/text.hpp"

namespace cem {

CoefficientSchedule CoefficientSchedule::one() { return {}; }

CoefficientSchedule CoefficientSchedule::step_window(double t0, double t1) {
    CoefficientSchedule s;
    s.kind = Kind::StepWindow;
    s.t0 = t0;
    s.t1 = t1;
    return s;
}

CoefficientSchedule CoefficientSchedule::ramp_up(double period) {
    CoefficientSchedule s;
    s.kind = Kind::RampUp;
    s.period = period;
    return s;
}

CoefficientSchedule CoefficientSchedule::ramp_down(double period) {
    CoefficientSchedule s;
    s.kind = Kind::RampDown;
    s.period = period;
    return s;
}

double CoefficientSchedule::eval(double t) const {
    switch (kind) {
        case Kind::One: return 1.0;
        case Kind::StepWindow: return (t >= t0 && t < t1) ? 1.0 : 0.0;
        case Kind::RampUp: return t / period;
        case Kind::RampDown: return 1.0 - t / period;
    }
    return 0.0;
}

void CoefficientSchedule::append_breakpoints(double t_begin, double t_end,
                                             std::vector<double>& out) const {
    if (kind != Kind::StepWindow) return;
    for (double t : {t0, t1})
        if (t > t_begin && t < t_end) out.push_back(t);
}

std::string CoefficientSchedule::describe() const {
    switch (kind) {
        case Kind::One: return "one";
        case Kind::StepWindow:
            return "step " + format_double(t0) + " " + format_double(t1);
        case Kind::RampUp: return "ramp_up " + format_double(period);
        case Kind::RampDown: return "ramp_down " + format_double(period);
    }
    return "one";
}

CoefficientSchedule CoefficientSchedule::parse(const std::string& text) {
    std::istringstream in(text);
    std::string kind;
    in >> kind;
    CoefficientSchedule s;
    if (kind == "one") {
        s.kind = Kind::One;
    } else if (kind == "step") {
        std::string a, b;
        in >> a >> b;
        s = step_window(parse_double(a), parse_double(b));
    } else if (kind == "ramp_up") {
        std::string a;
        in >> a;
        s = ramp_up(parse_double(a));
    } else if (kind == "ramp_down") {
        std::string a;
        in >> a;
        s = ramp_down(parse_double(a));
    } else {
        throw std::invalid_argument("unknown schedule kind: " + kind);
    }
    return s;
}

int SystemSpec::add_handle(std::string name, CoefficientSchedule sched) {
    handles.push_back(sched);
    handle_names.push_back(std::move(name));
    return static_cast<int>(handles.size()) - 1;
}

void SystemSpec::add_hamiltonian(const OperatorSum& h, int handle) {
    OperatorSum tagged = h;
    if (handle != kNoHandle) {
        if (handle < 0 || handle >= static_cast<int>(handles.size()))
            throw std::invalid_argument("unknown coefficient handle");
        tagged.tag_handle(handle);
    }
    hamiltonian += tagged;
}

void SystemSpec::add_decay(Eigen::MatrixXcd gamma) {
    if (gamma.rows() != n_sites || gamma.cols() != n_sites)
        throw std::invalid_argument("decay matrix must be N x N");
    dissipators.push_back({std::move(gamma)});
}

void SystemSpec::validate() const {
    if (n_sites < 1) throw std::invalid_argument("system needs at least one site");
    if (hamiltonian.n_sites() != n_sites)
        throw std::invalid_argument("hamiltonian system size mismatch");
    for (const auto& d : dissipators) {
        if (d.gamma.rows() != n_sites || d.gamma.cols() != n_sites)
            throw std::invalid_argument("decay matrix must be N x N");
        if (!d.gamma.isApprox(d.gamma.adjoint(), 1e-12))
            throw std::invalid_argument("decay matrix must be Hermitian");
        for (int i = 0; i < n_sites; ++i)
            if (d.gamma(i, i).real() < 0.0)
                throw std::invalid_argument("decay matrix diagonal must be nonnegative");
    }
    for (const auto& t : hamiltonian.terms())
        if (t.handle != kNoHandle && t.handle >= static_cast<int>(handles.size()))
            throw std::invalid_argument("hamiltonian references unknown handle");
}

std::string SystemSpec::describe() const {
    std::string out = "system nsites=" + std::to_string(n_sites) + "\n";
    out += "hamiltonian " + to_string(hamiltonian) + "\n";
    for (std::size_t h = 0; h < handles.size(); ++h)
        out += "handle " + std::to_string(h) + " " + handle_names[h] + " " +
               handles[h].describe() + "\n";
    for (const auto& d : dissipators) {
        out += "decay";
        for (int i = 0; i < d.gamma.rows(); ++i)
            for (int j = 0; j < d.gamma.cols(); ++j) out += " " + format_complex(d.gamma(i, j));
        out += "\n";
    }
    return out;
}

ProductStateSpec ProductStateSpec::all_ground(int n) {
    ProductStateSpec s;
    s.sites.assign(n, Eigen::Vector2cd(1.0, 0.0));
    return s;
}

ProductStateSpec ProductStateSpec::all_excited(int n) {
    ProductStateSpec s;
    s.sites.assign(n, Eigen::Vector2cd(0.0, 1.0));
    return s;
}

ProductStateSpec ProductStateSpec::all_plus(int n) {
    ProductStateSpec s;
    const double r = 1.0 / std::sqrt(2.0);
    s.sites.assign(n, Eigen::Vector2cd(r, r));
    return s;
}

void ProductStateSpec::validate() const {
    for (const auto& v : sites)
        if (std::abs(v.squaredNorm() - 1.0) > 1e-12)
            throw std::invalid_argument("site state is not normalized");
}

Complex ProductStateSpec::site_expectation(int site, OpKind k) const {
    const auto& v = sites.at(site - 1);
    const Complex cg = v(0), ce = v(1);
    switch (k) {
        case OpKind::SigmaPlus: return std::conj(ce) * cg;   // <psi|e><g|psi>
        case OpKind::SigmaMinus: return std::conj(cg) * ce;
        case OpKind::Sigma22: return std::conj(ce) * ce;
    }
    return 0.0;
}

Complex ProductStateSpec::moment_value(const Moment& m) const {
    Complex v = 1.0;
    for (const auto& f : m.factors) v *= site_expectation(f.site, f.kind);
    return v;
}

OperatorSum moment_rhs(const Moment& m, const SystemSpec& sys) {
    for (const auto& f : m.factors)
        if (f.site < 1 || f.site > sys.n_sites)
            throw std::invalid_argument("moment references site outside the system");

    const OperatorSum op = OperatorSum::from_term(sys.n_sites, {Complex(1.0), kNoHandle, m.factors});
    OperatorSum rhs = Complex(0.0, 1.0) * commutator(sys.hamiltonian, op);

    // Adjoint-Lindblad dissipator for jump operators sigma^-_i:
    //   1/2 sum_ij Gamma_ij (2 sp_j O sm_i - sp_i sm_j O - O sp_i sm_j)
    for (const auto& chan : sys.dissipators) {
        for (int i = 1; i <= sys.n_sites; ++i) {
            for (int j = 1; j <= sys.n_sites; ++j) {
                const Complex g = chan.gamma(i - 1, j - 1);
                if (g == 0.0) continue;
                const auto sp_i = OperatorSum::sigma_plus(sys.n_sites, i);
                const auto sp_j = OperatorSum::sigma_plus(sys.n_sites, j);
                const auto sm_i = OperatorSum::sigma_minus(sys.n_sites, i);
                const auto sm_j = OperatorSum::sigma_minus(sys.n_sites, j);
                OperatorSum sandwich = multiply(sp_j, multiply(op, sm_i));
                OperatorSum number = multiply(sp_i, sm_j);
                rhs += (0.5 * g) * (2.0 * sandwich - anticommutator(number, op));
            }
        }
    }
    return rhs;
}

namespace {

Moment representative(const Moment& m, bool reduce) {
    if (!reduce) return m;
    Moment adj = m.adjointed();
    return adj < m ? adj : m;
}

bool moment_canonical_less(const Moment& a, const Moment& b) {
    if (a.order() != b.order()) return a.order() < b.order();
    return a < b;
}

// Expectation of an operator sum, closed at `order`: moments above the
// order are expanded. Monomials keep the true moments; conjugate
// resolution against the variable set happens when the system is compiled.
void expectation_closed(const OperatorSum& rhs, int order, std::vector<Monomial>& monos) {
    for (const auto& term : rhs.terms()) {
        if (term.factors.empty()) {
            monos.push_back({term.coeff, term.handle, {}});
            continue;
        }
        Moment m{term.factors};
        if (m.order() <= order) {
            monos.push_back({term.coeff, term.handle, {std::move(m)}});
            continue;
        }
        for (const auto& e : expand_moment_exact(m, order)) {
            Monomial mono;
            mono.coeff = term.coeff * static_cast<double>(e.coeff);
            mono.handle = term.handle;
            mono.moments = e.moments;
            monos.push_back(std::move(mono));
        }
    }
}

std::size_t closure_upper_bound(int n, int order) {
    // sum_{k=1..order} C(n,k) 3^k
    std::size_t total = 0;
    double binom = 1;
    std::size_t pow3 = 1;
    for (int k = 1; k <= order; ++k) {
        binom = binom * (n - k + 1) / k;
        pow3 *= 3;
        total += static_cast<std::size_t>(binom + 0.5) * pow3;
    }
    return total;
}

}  // namespace

std::optional<std::pair<int, bool>> MomentODESystem::lookup(const Moment& m) const {
    auto find = [this](const std::string& key) -> int {
        auto it = std::lower_bound(index_.begin(), index_.end(), key,
                                   [](const auto& a, const std::string& k) { return a.first < k; });
        if (it != index_.end() && it->first == key) return it->second;
        return -1;
    };
    if (int idx = find(m.key()); idx >= 0) return std::make_pair(idx, false);
    if (int idx = find(m.adjointed().key()); idx >= 0) return std::make_pair(idx, true);
    return std::nullopt;
}

void MomentODESystem::check_closed() const {
    const int n = static_cast<int>(variables.size());
    if (static_cast<int>(rhs.size()) != n)
        throw std::logic_error("moment system: rhs/variable count mismatch");
    for (const auto& poly : rhs)
        for (const auto& mono : poly) {
            for (auto [idx, conj] : mono.factors) {
                (void)conj;
                if (idx < 0 || idx >= n)
                    throw std::logic_error("moment system references undeclared variable");
            }
            if (mono.handle != kNoHandle &&
                mono.handle >= static_cast<int>(handles.size()))
                throw std::logic_error("moment system references unknown handle");
        }
}

void MomentODESystem::rebuild_index() {
    index_.clear();
    index_.reserve(variables.size());
    for (std::size_t i = 0; i < variables.size(); ++i)
        index_.emplace_back(variables[i].key(), static_cast<int>(i));
    std::sort(index_.begin(), index_.end());
}

MomentODESystem generate_closed_system(const SystemSpec& sys, const ClosureOptions& opt) {
    sys.validate();
    if (opt.order < 1 || opt.order > sys.n_sites)
        throw std::out_of_range("closure order must be in [1, N]");

    MomentODESystem out;
    out.n_sites = sys.n_sites;
    out.order = opt.order;
    out.conjugate_reduced = opt.conjugate_reduction;
    out.handles = sys.handles;
    out.handle_names = sys.handle_names;
    out.count_upper_bound = closure_upper_bound(sys.n_sites, opt.order);

    // Seed: every first-order moment, mapped to representatives.
    std::set<Moment> discovered;
    std::vector<Moment> frontier;
    for (int m = 1; m <= sys.n_sites; ++m)
        for (OpKind k : {OpKind::SigmaPlus, OpKind::SigmaMinus, OpKind::Sigma22}) {
            Moment mom{{{m, k}}};
            Moment rep = representative(mom, opt.conjugate_reduction);
            if (discovered.insert(rep).second) frontier.push_back(rep);
        }
    std::sort(frontier.begin(), frontier.end(), moment_canonical_less);

    std::map<Moment, MomentPolynomial> equations;
    std::set<Moment> seen_keys;  // all reachable keys incl. conjugate partners
    for (const auto& m : frontier) {
        seen_keys.insert(m);
        seen_keys.insert(m.adjointed());
    }

    while (!frontier.empty()) {
        std::vector<MomentPolynomial> results(frontier.size());
        const std::int64_t n = static_cast<std::int64_t>(frontier.size());
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
        for (std::int64_t i = 0; i < n; ++i) {
            std::vector<Monomial> monos;
            expectation_closed(moment_rhs(frontier[i], sys), opt.order, monos);
            results[i] = MomentPolynomial(std::move(monos));
        }

        std::vector<Moment> next;
        for (std::int64_t i = 0; i < n; ++i) {
            for (const auto& mono : results[i].monomials())
                for (const auto& mm : mono.moments) {
                    seen_keys.insert(mm);
                    seen_keys.insert(mm.adjointed());
                    Moment rep = representative(mm, opt.conjugate_reduction);
                    if (discovered.insert(rep).second) next.push_back(rep);
                }
            equations.emplace(frontier[i], std::move(results[i]));
        }
        std::sort(next.begin(), next.end(), moment_canonical_less);
        frontier = std::move(next);
    }

    out.count_discovered = seen_keys.size();
    out.variables.assign(discovered.begin(), discovered.end());
    std::sort(out.variables.begin(), out.variables.end(), moment_canonical_less);
    out.rebuild_index();

    out.conjugate_keys.reserve(out.variables.size());
    out.conjugate_var.assign(out.variables.size(), -1);
    for (std::size_t i = 0; i < out.variables.size(); ++i) {
        Moment adj = out.variables[i].adjointed();
        out.conjugate_keys.push_back(adj.key());
        if (auto hit = out.lookup(adj); hit && !hit->second)
            out.conjugate_var[i] = hit->first;
    }

    out.rhs.resize(out.variables.size());
    for (std::size_t i = 0; i < out.variables.size(); ++i) {
        const auto& poly = equations.at(out.variables[i]);
        auto& compiled = out.rhs[i];
        compiled.reserve(poly.monomials().size());
        for (const auto& mono : poly.monomials()) {
            CompiledMonomial cm;
            cm.coeff = mono.coeff;
            cm.handle = mono.handle;
            cm.factors.reserve(mono.moments.size());
            for (const auto& mm : mono.moments) {
                auto hit = out.lookup(mm);
                if (!hit) throw std::logic_error("closure loop lost a variable");
                cm.factors.emplace_back(hit->first, hit->second);
            }
            compiled.push_back(std::move(cm));
        }
    }
    out.check_closed();
    return out;
}

Eigen::VectorXcd initial_moments(const ProductStateSpec& state, const MomentODESystem& sys) {
    state.validate();
    if (static_cast<int>(state.sites.size()) != sys.n_sites)
        throw std::invalid_argument("product state size mismatch");
    Eigen::VectorXcd y(sys.variables.size());
    for (std::size_t i = 0; i < sys.variables.size(); ++i)
        y(static_cast<long>(i)) = state.moment_value(sys.variables[i]);
    return y;
}

}  // namespace cem
