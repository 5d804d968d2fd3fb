#include <sstream>
#include <stdexcept>

#include "cem/eom.hpp"
#include "cem/text.hpp"

namespace cem {

namespace {

constexpr const char* kFormatTag = "cemsys";
constexpr int kFormatVersion = 1;

SiteOperator parse_site_operator(const std::string& tok) {
    auto lb = tok.find('[');
    auto rb = tok.find(']');
    if (lb == std::string::npos || rb != tok.size() - 1)
        throw std::invalid_argument("bad operator token: " + tok);
    const std::string label = tok.substr(0, lb);
    const int site = std::stoi(tok.substr(lb + 1, rb - lb - 1));
    OpKind kind;
    if (label == "sp") kind = OpKind::SigmaPlus;
    else if (label == "sm") kind = OpKind::SigmaMinus;
    else if (label == "s22") kind = OpKind::Sigma22;
    else throw std::invalid_argument("bad operator label: " + label);
    return {site, kind};
}

Moment parse_moment_key(const std::string& key) {
    Moment m;
    if (key == "1") return m;
    std::size_t pos = 0;
    while (pos <= key.size()) {
        auto star = key.find('*', pos);
        const std::string tok =
            star == std::string::npos ? key.substr(pos) : key.substr(pos, star - pos);
        m.factors.push_back(parse_site_operator(tok));
        if (star == std::string::npos) break;
        pos = star + 1;
    }
    return m;
}

}  // namespace

std::string serialize(const MomentODESystem& sys) {
    std::ostringstream out;
    out << kFormatTag << " " << kFormatVersion << "\n";
    out << "nsites " << sys.n_sites << "\n";
    out << "order " << sys.order << "\n";
    out << "reduced " << (sys.conjugate_reduced ? 1 : 0) << "\n";
    out << "counts " << sys.count_upper_bound << " " << sys.count_discovered << "\n";
    out << "handles " << sys.handles.size() << "\n";
    for (std::size_t h = 0; h < sys.handles.size(); ++h)
        out << "h" << h << " " << sys.handle_names[h] << " " << sys.handles[h].describe()
            << "\n";
    out << "variables " << sys.variables.size() << "\n";
    for (std::size_t i = 0; i < sys.variables.size(); ++i)
        out << "v" << i << " " << sys.variables[i].key() << "\n";
    for (std::size_t i = 0; i < sys.rhs.size(); ++i) {
        out << "rhs " << i << " " << sys.rhs[i].size() << "\n";
        for (const auto& mono : sys.rhs[i]) {
            out << "  " << format_complex(mono.coeff) << " " << mono.handle;
            out << " " << mono.factors.size();
            for (auto [idx, conj] : mono.factors) out << " " << idx << (conj ? "c" : "d");
            out << "\n";
        }
    }
    return out.str();
}

MomentODESystem parse_moment_system(const std::string& text) {
    std::istringstream in(text);
    std::string tag;
    int version = 0;
    in >> tag >> version;
    if (tag != kFormatTag || version != kFormatVersion)
        throw std::invalid_argument("unsupported equation-system format");

    MomentODESystem sys;
    std::string word;
    in >> word >> sys.n_sites;
    in >> word >> sys.order;
    int reduced = 0;
    in >> word >> reduced;
    sys.conjugate_reduced = reduced != 0;
    in >> word >> sys.count_upper_bound >> sys.count_discovered;

    std::size_t n_handles = 0;
    in >> word >> n_handles;
    in.ignore();
    for (std::size_t h = 0; h < n_handles; ++h) {
        std::string line;
        std::getline(in, line);
        std::istringstream ls(line);
        std::string id, name;
        ls >> id >> name;
        std::string rest;
        std::getline(ls, rest);
        sys.handle_names.push_back(name);
        sys.handles.push_back(CoefficientSchedule::parse(rest.substr(rest.find_first_not_of(' '))));
    }

    std::size_t n_vars = 0;
    in >> word >> n_vars;
    for (std::size_t i = 0; i < n_vars; ++i) {
        std::string id, key;
        in >> id >> key;
        sys.variables.push_back(parse_moment_key(key));
    }

    sys.rhs.resize(n_vars);
    for (std::size_t i = 0; i < n_vars; ++i) {
        std::size_t var = 0, count = 0;
        in >> word >> var >> count;
        if (word != "rhs" || var != i) throw std::invalid_argument("malformed rhs section");
        auto& poly = sys.rhs[i];
        poly.resize(count);
        for (std::size_t m = 0; m < count; ++m) {
            std::string coeff;
            int handle = kNoHandle;
            std::size_t nf = 0;
            in >> coeff >> handle >> nf;
            poly[m].coeff = parse_complex(coeff);
            poly[m].handle = handle;
            poly[m].factors.resize(nf);
            for (std::size_t f = 0; f < nf; ++f) {
                std::string fac;
                in >> fac;
                if (fac.empty()) throw std::invalid_argument("malformed monomial factor");
                const char suffix = fac.back();
                if (suffix != 'c' && suffix != 'd')
                    throw std::invalid_argument("malformed monomial factor");
                poly[m].factors[f] = {std::stoi(fac.substr(0, fac.size() - 1)), suffix == 'c'};
            }
        }
    }

    sys.rebuild_index();
    sys.conjugate_keys.clear();
    sys.conjugate_var.assign(n_vars, -1);
    for (std::size_t i = 0; i < n_vars; ++i) {
        Moment adj = sys.variables[i].adjointed();
        sys.conjugate_keys.push_back(adj.key());
        if (auto hit = sys.lookup(adj); hit && !hit->second)
            sys.conjugate_var[i] = hit->first;
    }
    sys.check_closed();
    return sys;
}

}  // namespace cem
