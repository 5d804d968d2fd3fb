#include "cem/trajectory.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cem/text.hpp"

namespace cem {

const std::vector<std::complex<double>>& Trajectory::at(const std::string& key) const {
    auto it = series.find(key);
    if (it == series.end())
        throw std::invalid_argument("trajectory has no series '" + key + "'");
    return it->second;
}

std::vector<double> Trajectory::real_observable(const std::string& kind, int site,
                                                int n_sites) const {
    auto one_site = [&](int m) {
        std::vector<double> v(grid.size());
        const std::string idx = "[" + std::to_string(m) + "]";
        if (kind == "22") {
            const auto& s = at("s22" + idx);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = s[i].real();
        } else if (kind == "z") {
            const auto& s = at("s22" + idx);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = 2.0 * s[i].real() - 1.0;
        } else if (kind == "x") {
            const auto& p = at("sp" + idx);
            const auto& m_ = at("sm" + idx);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = (p[i] + m_[i]).real();
        } else {
            throw std::invalid_argument("unknown observable kind '" + kind + "'");
        }
        return v;
    };
    if (site != 0) return one_site(site);
    std::vector<double> mean(grid.size(), 0.0);
    for (int m = 1; m <= n_sites; ++m) {
        auto v = one_site(m);
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
    }
    for (auto& x : mean) x /= n_sites;
    return mean;
}

void Trajectory::scan_physicality(int n_sites) {
    // <s22> in [0,1] and |<sx>| <= 1 hold for physical states; truncated
    // closures may leave the range, which is reported, not failed.
    constexpr double slack = 1e-9;
    for (std::size_t i = 0; i < valid_points; ++i) {
        for (int m = 1; m <= n_sites; ++m) {
            const std::string idx = "[" + std::to_string(m) + "]";
            const double pop = at("s22" + idx)[i].real();
            if (pop < -slack || pop > 1.0 + slack) {
                first_violation = {grid[i], "s22" + idx + " outside [0,1]"};
                return;
            }
            const double sx = (at("sp" + idx)[i] + at("sm" + idx)[i]).real();
            if (std::abs(sx) > 1.0 + slack) {
                first_violation = {grid[i], "|sx" + idx + "| above 1"};
                return;
            }
        }
    }
}

std::string status_name(Trajectory::Status s) {
    switch (s) {
        case Trajectory::Status::Completed: return "completed";
        case Trajectory::Status::Diverged: return "diverged";
        case Trajectory::Status::SolverFailure: return "solver_failure";
    }
    return "?";
}

Trajectory::Status status_from_name(const std::string& name) {
    if (name == "completed") return Trajectory::Status::Completed;
    if (name == "diverged") return Trajectory::Status::Diverged;
    if (name == "solver_failure") return Trajectory::Status::SolverFailure;
    throw std::invalid_argument("unknown status '" + name + "'");
}

std::string trajectory_csv(const Trajectory& t) {
    std::ostringstream out;
    out << "time";
    for (const auto& [key, vals] : t.series) {
        (void)vals;
        out << "," << key << ".re," << key << ".im";
    }
    out << "\n";
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
        out << format_double(t.grid[i]);
        for (const auto& [key, vals] : t.series) {
            (void)key;
            out << "," << format_double(vals[i].real()) << "," << format_double(vals[i].imag());
        }
        out << "\n";
    }
    return out.str();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        auto next = line.find(sep, pos);
        out.push_back(line.substr(pos, next == std::string::npos ? next : next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

double parse_cell(const std::string& s) {
    if (s == "nan" || s == "-nan") return std::nan("");
    return parse_double(s);
}

}  // namespace

Trajectory trajectory_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string header;
    if (!std::getline(in, header)) throw std::invalid_argument("empty trajectory CSV");
    auto cols = split(header, ',');
    if (cols.empty() || cols[0] != "time")
        throw std::invalid_argument("trajectory CSV must start with a time column");
    if ((cols.size() - 1) % 2 != 0)
        throw std::invalid_argument("trajectory CSV needs .re/.im column pairs");

    std::vector<std::string> keys;
    for (std::size_t c = 1; c < cols.size(); c += 2) {
        const std::string& re = cols[c];
        const std::string& im = cols[c + 1];
        if (re.size() < 4 || re.substr(re.size() - 3) != ".re" ||
            im.size() < 4 || im.substr(im.size() - 3) != ".im" ||
            re.substr(0, re.size() - 3) != im.substr(0, im.size() - 3))
            throw std::invalid_argument("bad column pair: " + re + "," + im);
        keys.push_back(re.substr(0, re.size() - 3));
    }

    Trajectory t;
    for (const auto& k : keys) t.series[k] = {};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != cols.size())
            throw std::invalid_argument("trajectory CSV row width mismatch");
        t.grid.push_back(parse_cell(cells[0]));
        for (std::size_t c = 0; c < keys.size(); ++c)
            t.series[keys[c]].push_back(
                {parse_cell(cells[1 + 2 * c]), parse_cell(cells[2 + 2 * c])});
    }

    // valid prefix = rows before the first NaN in any series
    t.valid_points = t.grid.size();
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
        bool bad = false;
        for (const auto& [k, v] : t.series) {
            (void)k;
            if (std::isnan(v[i].real()) || std::isnan(v[i].imag())) {
                bad = true;
                break;
            }
        }
        if (bad) {
            t.valid_points = i;
            t.status = Trajectory::Status::Diverged;
            t.stopped_at = i > 0 ? t.grid[i - 1] : t.grid.front();
            break;
        }
    }
    return t;
}

}  // namespace cem
