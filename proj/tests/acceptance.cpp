// Acceptance suite: one pass/fail line per criterion. The default run uses
// the CI-sized variant of the convergence-table criterion (N = 5); pass
// --full for the N = 6 variant with the published-value band checks.

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cem/dense.hpp"
#include "cem/metrics.hpp"
#include "cem/models.hpp"
#include "cem/runner.hpp"
#include "cem/solvers.hpp"

using namespace cem;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int number;
    std::string label;
    std::function<bool(std::string&)> run;
};

bool g_full = false;
fs::path g_out;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------- criterion 1: combinatorial core against brute force ----------

using RawPartition = std::vector<std::vector<int>>;

void enumerate_brute(const std::vector<int>& elems, RawPartition& acc,
                     std::vector<RawPartition>& out) {
    if (elems.empty()) {
        out.push_back(acc);
        return;
    }
    const int head = elems[0];
    const std::vector<int> tail(elems.begin() + 1, elems.end());
    for (std::size_t mask = 0; mask < (1u << tail.size()); ++mask) {
        std::vector<int> block{head}, rest;
        for (std::size_t i = 0; i < tail.size(); ++i)
            (mask & (1u << i)) ? block.push_back(tail[i]) : rest.push_back(tail[i]);
        acc.push_back(block);
        enumerate_brute(rest, acc, out);
        acc.pop_back();
    }
}

using KeyPoly = std::map<std::vector<std::string>, long long>;

KeyPoly brute_expand(const Moment& m, const std::vector<int>& idx, int order) {
    auto key_of = [&](const std::vector<int>& block) {
        Moment sub;
        for (int i : block) sub.factors.push_back(m.factors[i]);
        return sub.key();
    };
    if (static_cast<int>(idx.size()) <= order) return {{{key_of(idx)}, 1}};
    std::vector<int> local(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) local[i] = static_cast<int>(i);
    std::vector<RawPartition> parts;
    RawPartition acc;
    enumerate_brute(local, acc, parts);
    KeyPoly out;
    for (const auto& p : parts) {
        if (p.size() == 1) continue;
        long long w = 1;
        for (std::size_t b = 2; b < p.size(); ++b) w *= static_cast<long long>(b);
        if (p.size() % 2 != 0) w = -w;
        KeyPoly prod{{{}, w}};
        for (const auto& block : p) {
            std::vector<int> sub;
            for (int i : block) sub.push_back(idx[i]);
            KeyPoly factor = brute_expand(m, sub, order);
            KeyPoly next;
            for (const auto& [ka, ca] : prod)
                for (const auto& [kb, cb] : factor) {
                    auto key = ka;
                    key.insert(key.end(), kb.begin(), kb.end());
                    std::sort(key.begin(), key.end());
                    next[key] += ca * cb;
                }
            prod = std::move(next);
        }
        for (const auto& [k, c] : prod) out[k] += c;
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
}

bool criterion_cumulant_oracle(std::string& detail) {
    const double tic = omp_get_wtime();
    const long long bell[] = {0, 1, 2, 5, 15, 52, 203, 877, 4140};
    for (int n = 1; n <= 8; ++n)
        if (set_partitions(n).size() != static_cast<std::size_t>(bell[n])) {
            detail = "partition count mismatch at n=" + std::to_string(n);
            return false;
        }
    for (int n = 2; n <= 6; ++n) {
        Moment m;
        for (int i = 1; i <= n; ++i) m.factors.push_back({i, OpKind::Sigma22});
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        for (int o = 1; o < n; ++o) {
            KeyPoly impl;
            for (const auto& mono : expand_moment_exact(m, o)) {
                std::vector<std::string> key;
                for (const auto& mm : mono.moments) key.push_back(mm.key());
                std::sort(key.begin(), key.end());
                impl[key] += mono.coeff;
            }
            std::erase_if(impl, [](const auto& kv) { return kv.second == 0; });
            if (impl != brute_expand(m, idx, o)) {
                detail = "coefficient mismatch at n=" + std::to_string(n) +
                         " o=" + std::to_string(o);
                return false;
            }
        }
    }
    const double wall = omp_get_wtime() - tic;
    std::ostringstream ss;
    ss << "B1..B8 exact, n<=6 coefficients exact, " << wall << " s";
    detail = ss.str();
    return wall < 10.0;
}

// ---------- criterion 2: exactness at top order ----------

double max_first_order_deviation(const Trajectory& a, const Trajectory& b, int n) {
    double worst = 0;
    for (int m = 1; m <= n; ++m) {
        const std::string idx = "[" + std::to_string(m) + "]";
        for (const char* key : {"s22", "sp", "sm"}) {
            const auto& x = a.at(key + idx);
            const auto& y = b.at(key + idx);
            for (std::size_t i = 0; i < x.size(); ++i)
                worst = std::max(worst, std::abs(x[i] - y[i]));
        }
    }
    return worst;
}

bool criterion_top_order_exact(std::string& detail) {
    const double tic = omp_get_wtime();
    IntegratorConfig cfg;
    std::ostringstream ss;
    bool ok = true;

    for (int n : {2, 3, 4}) {
        DipoleChainParams p;
        p.n = n;
        p.d_over_lambda = 0.15;
        p.eta_over_gamma = 2.0;
        SystemSpec spec = build_chain_system(p);
        const auto grid = uniform_grid(0.0, p.t_total, 1001);
        auto sys = generate_closed_system(spec, {n, true, true});
        auto cem_traj = integrate_moments(
            sys, initial_moments(ProductStateSpec::all_ground(n), sys), grid, cfg);
        const Eigen::VectorXcd psi =
            product_state_vector(ProductStateSpec::all_ground(n).sites);
        auto fqd = solve_master_equation(spec, psi * psi.adjoint(), grid, cfg);
        const double dev = max_first_order_deviation(cem_traj, fqd, n);
        ss << "chain N=" << n << " dev=" << dev << "; ";
        ok = ok && cem_traj.completed() && fqd.completed() && dev < 1e-6;
    }
    for (long long omega : {21LL, 15LL}) {
        BiprimeParams p;
        p.omega = omega;
        SystemSpec spec = build_biprime_system(p);
        const auto grid = uniform_grid(0.0, p.t_total, 1001);
        auto sys = generate_closed_system(spec, {3, true, true});
        auto cem_traj = integrate_moments(
            sys, initial_moments(ProductStateSpec::all_plus(3), sys), grid, cfg);
        auto fqd = solve_schrodinger(
            spec, product_state_vector(ProductStateSpec::all_plus(3).sites), grid, cfg);
        const double dev = max_first_order_deviation(cem_traj, fqd, 3);
        ss << "biprime w=" << omega << " dev=" << dev << "; ";
        ok = ok && cem_traj.completed() && fqd.completed() && dev < 1e-6;
    }
    const double wall = omp_get_wtime() - tic;
    ss << wall << " s";
    detail = ss.str();
    return ok && wall < 300.0;
}

// ---------- criterion 3: convergence-table trend ----------

bool criterion_table_trend(std::string& detail) {
    const int n = g_full ? 6 : 5;
    RunConfig cfg;
    cfg.model = "chain";
    cfg.chain.n = n;
    cfg.chain.d_over_lambda = 0.1;
    cfg.chain.eta_over_gamma = 2.0;
    cfg.orders.clear();
    for (int o = 1; o <= n; ++o) cfg.orders.push_back(o);
    cfg.exact = true;
    cfg.grid_points = 100;  // the published sums correspond to a coarse grid
    cfg.output_dir = (g_out / ("criterion3_N" + std::to_string(n))).string();
    const auto res = run_scenario(cfg);

    std::vector<double> d22, dz, dx;
    for (int o = 1; o <= n; ++o) {
        const OrderRun* run = res.find(o);
        if (!run || !run->trajectory.completed()) {
            detail = "order " + std::to_string(o) + " did not complete";
            return false;
        }
        d22.push_back(run->errors[0].total);
        dz.push_back(run->errors[1].total);
        dx.push_back(run->errors[2].total);
    }

    std::ostringstream ss;
    ss << "N=" << n << " delta_22:";
    for (double v : d22) ss << " " << v;
    bool ok = true;
    for (std::size_t i = 1; i < d22.size(); ++i)
        ok = ok && d22[i] < d22[i - 1] && dz[i] < dz[i - 1] && dx[i] < dx[i - 1];
    if (!ok) ss << " [not strictly decreasing across 22/z/x]";
    const double span = d22.front() / d22.back();
    if (span < 1e7) {
        ok = false;
        ss << " [span " << span << " < 1e7]";
    }
    if (d22.back() >= 1e-7) {
        ok = false;
        ss << " [top order above 1e-7]";
    }
    if (g_full) {
        const double reference[] = {1.983e-1, 7.92e-3, 1.512e-3, 1.735e-4, 1.405e-5};
        for (int o = 1; o <= 5; ++o) {
            const double ratio = d22[o - 1] / reference[o - 1];
            if (ratio > 10.0 || ratio < 0.1) {
                ok = false;
                ss << " [o=" << o << " off reference value x" << ratio << "]";
            }
        }
    }
    detail = ss.str();
    return ok;
}

// ---------- criterion 4: mean-field agreement at large spacing ----------

bool criterion_good_regime(std::string& detail) {
    DipoleChainParams p;
    p.n = 5;
    p.d_over_lambda = 1.0;
    p.eta_over_gamma = 2.0;
    SystemSpec spec = build_chain_system(p);
    const auto grid = uniform_grid(0.0, p.t_total, 1001);
    IntegratorConfig cfg;
    auto sys = generate_closed_system(spec, {1, true, true});
    auto mf = integrate_moments(sys, initial_moments(ProductStateSpec::all_ground(5), sys),
                                grid, cfg);
    const Eigen::VectorXcd psi = product_state_vector(ProductStateSpec::all_ground(5).sites);
    auto fqd = solve_master_equation(spec, psi * psi.adjoint(), grid, cfg);
    const auto a = mf.real_observable("22", 0, 5);
    const auto e = fqd.real_observable("22", 0, 5);
    double worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - e[i]));
    std::ostringstream ss;
    ss << "max |mean s22 difference| = " << worst;
    detail = ss.str();
    return mf.completed() && fqd.completed() && worst < 0.05;
}

// ---------- criteria 5 and 6: annealer regimes ----------

bool criterion_bad_regime(std::string& detail) {
    const double tic = omp_get_wtime();
    RunConfig cfg;
    cfg.model = "biprime";
    cfg.biprime.omega = 21;
    cfg.orders = {1, 2, 3};
    cfg.output_dir = (g_out / "criterion5_w21").string();
    const auto res = run_scenario(cfg);

    std::ostringstream ss;
    bool ok = true;
    double d[4][4];  // [order][site]
    for (int o : {1, 2, 3}) {
        const OrderRun* run = res.find(o);
        if (!run || !run->trajectory.completed()) {
            detail = "order " + std::to_string(o) + " did not complete";
            return false;
        }
        for (const auto& e : run->errors) d[o][e.site] = e.total;
    }
    for (int o : {1, 2})
        for (int site = 1; site <= 3; ++site) {
            if (d[o][site] < 1e-5 || d[o][site] > 1e-1) {
                ok = false;
                ss << "[o=" << o << " site " << site << " outside band: " << d[o][site]
                   << "] ";
            }
        }
    for (int site : {2, 3})
        if (d[2][site] < d[1][site] / 10.0) {
            ok = false;
            ss << "[site " << site << ": o=2 more than 10x better] ";
        }
    for (int site = 1; site <= 3; ++site)
        if (d[3][site] > d[1][site] / 10.0) {
            ok = false;
            ss << "[site " << site << ": o=3 not 10x smaller than o=1] ";
        }
    for (int o : {1, 3}) {
        const OrderRun* run = res.find(o);
        if (run->readout.refused || run->readout.bits != std::vector<int>{1, 1, 1} ||
            !run->readout.valid) {
            ok = false;
            ss << "[o=" << o << " bits wrong or invalid] ";
        }
    }
    const double wall = omp_get_wtime() - tic;
    ss << "o1=(" << d[1][1] << "," << d[1][2] << "," << d[1][3] << ") o2=(" << d[2][1]
       << "," << d[2][2] << "," << d[2][3] << ") " << wall << " s";
    detail = ss.str();
    return ok && wall < 120.0;
}

bool criterion_ugly_regime(std::string& detail) {
    const double tic = omp_get_wtime();
    RunConfig cfg;
    cfg.model = "biprime";
    cfg.biprime.omega = 15;
    cfg.orders = {1, 2, 3};
    cfg.output_dir = (g_out / "criterion6_w15").string();
    const auto res = run_scenario(cfg);

    std::ostringstream ss;
    bool ok = true;

    const OrderRun* o2 = res.find(2);
    bool blown = !o2->trajectory.completed();
    if (o2->trajectory.completed()) {
        for (int m = 1; m <= 3 && !blown; ++m)
            for (const auto& v : o2->trajectory.at("s22[" + std::to_string(m) + "]"))
                if (std::abs(v) > 1e3) {
                    blown = true;
                    break;
                }
    }
    if (!blown) {
        ok = false;
        ss << "[o=2 neither diverged nor above 1e3] ";
    }
    if (!o2->readout.refused) {
        ok = false;
        ss << "[o=2 read-out not refused] ";
    }

    const OrderRun* o1 = res.find(1);
    if (!o1->trajectory.completed() || o1->readout.bits != std::vector<int>{0, 1, 1}) {
        ok = false;
        ss << "[o=1 bits wrong] ";
    }
    for (const auto& e : o1->errors)
        if (e.total > 2.0) {
            ok = false;
            ss << "[o=1 delta above order 1: " << e.total << "] ";
        }

    const OrderRun* o3 = res.find(3);
    const OrderRun* exact = res.find(0, true);
    const double dev =
        max_first_order_deviation(o3->trajectory, exact->trajectory, 3);
    if (!(o3->trajectory.completed() && dev < 1e-6)) {
        ok = false;
        ss << "[o=3 deviates from FQD by " << dev << "] ";
    }

    const std::string report = slurp(res.report_path);
    if (report.find("[o=2] status=diverged") == std::string::npos &&
        report.find("[o=2] status=solver_failure") == std::string::npos) {
        ok = false;
        ss << "[report does not flag o=2] ";
    }
    if (res.runs.size() != 4) {
        ok = false;
        ss << "[scenario did not complete all orders] ";
    }

    const double wall = omp_get_wtime() - tic;
    ss << "o2 status=" << status_name(o2->trajectory.status) << " stopped at s="
       << o2->trajectory.stopped_at << ", " << wall << " s";
    detail = ss.str();
    return ok && wall < 120.0;
}

// ---------- criterion 7: exact-solver physics invariants ----------

bool criterion_physics_invariants(std::string& detail) {
    IntegratorConfig cfg;
    std::ostringstream ss;
    bool ok = true;

    DipoleChainParams p;
    p.n = 2;
    p.d_over_lambda = 0.15;
    p.eta_over_gamma = 2.0;
    SystemSpec spec = build_chain_system(p);
    const auto grid = uniform_grid(0.0, 10.0, 1001);
    const Eigen::VectorXcd psi = product_state_vector(ProductStateSpec::all_ground(2).sites);
    auto me = solve_master_equation(spec, psi * psi.adjoint(), grid, cfg);
    ss << "trace drift " << me.conservation_drift;
    ok = ok && me.completed() && me.conservation_drift < 1e-9;

    BiprimeParams bp;
    bp.omega = 21;
    SystemSpec bspec = build_biprime_system(bp);
    auto se = solve_schrodinger(
        bspec, product_state_vector(ProductStateSpec::all_plus(3).sites), grid, cfg);
    ss << ", norm drift " << se.conservation_drift;
    ok = ok && se.completed() && se.conservation_drift < 1e-9;

    // decoupled-limit factorization
    DipoleChainParams far_pair = p;
    far_pair.d_over_lambda = 1e3;
    SystemSpec spec2 = build_chain_system(far_pair);
    auto joint = solve_master_equation(spec2, psi * psi.adjoint(), grid, cfg);
    DipoleChainParams single = far_pair;
    single.n = 1;
    SystemSpec spec1 = build_chain_system(single);
    const Eigen::VectorXcd psi1 = product_state_vector(ProductStateSpec::all_ground(1).sites);
    auto solo = solve_master_equation(spec1, psi1 * psi1.adjoint(), grid, cfg);
    double worst = 0;
    for (int m = 1; m <= 2; ++m) {
        const auto& a = joint.at("s22[" + std::to_string(m) + "]");
        const auto& b = solo.at("s22[1]");
        for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    ss << ", decoupling deviation " << worst;
    ok = ok && worst < 1e-6;
    detail = ss.str();
    return ok;
}

// ---------- criterion 8: coupling formulas ----------

bool criterion_couplings(std::string& detail) {
    // independently coded evaluation of the free-space coupling formulas
    auto omega_ref = [](double xi, double g) {
        const double s = std::sin(xi), c = std::cos(xi);
        return (-3.0 * g / 4.0) * (c / xi - (s / (xi * xi) + c / (xi * xi * xi)));
    };
    auto gamma_ref = [](double xi, double g) {
        const double s = std::sin(xi), c = std::cos(xi);
        return (3.0 * g / 2.0) * (s / xi + (c / (xi * xi) - s / (xi * xi * xi)));
    };
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
        const double xi = 0.05 + 15.0 * i / 49.0;
        worst = std::max(worst, std::abs(coupling_omega(xi, 1.0) - omega_ref(xi, 1.0)));
        worst = std::max(worst, std::abs(coupling_gamma(xi, 1.0) - gamma_ref(xi, 1.0)));
    }
    const double series_dev = std::abs(coupling_gamma(1e-3, 1.0) - (1.0 - 1e-6 / 5.0));
    std::ostringstream ss;
    ss << "grid deviation " << worst << ", small-xi series deviation " << series_dev;
    detail = ss.str();
    return worst <= 1e-12 && series_dev < 1e-9;
}

// ---------- criterion 9: determinism and provenance ----------

bool criterion_provenance(std::string& detail) {
    bool ok = true;
    std::ostringstream ss;
    int compared = 0;
    for (const char* model : {"chain", "biprime"}) {
        RunConfig cfg;
        cfg.model = model;
        cfg.chain.n = 2;
        cfg.chain.d_over_lambda = 0.15;
        cfg.chain.eta_over_gamma = 2.0;
        cfg.biprime.omega = 21;
        cfg.orders = {1, 2};
        cfg.grid_points = 100;
        cfg.output_dir = (g_out / (std::string("criterion9_") + model + "_a")).string();
        const auto res_a = run_scenario(cfg);

        RunConfig again = config_from_sidecar(res_a.runs.front().sidecar_path);
        again.output_dir = (g_out / (std::string("criterion9_") + model + "_b")).string();
        const auto res_b = run_scenario(again);

        for (std::size_t i = 0; i < res_a.runs.size(); ++i) {
            ++compared;
            if (slurp(res_a.runs[i].trajectory_path) !=
                slurp(res_b.runs[i].trajectory_path)) {
                ok = false;
                ss << "[" << model << " run " << i << " differs] ";
            }
        }
    }
    ss << compared << " trajectory files byte-compared";
    detail = ss.str();
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--full") == 0) g_full = true;
        if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) g_out = argv[i + 1];
    }
    if (g_out.empty()) g_out = fs::temp_directory_path() / "cem_acceptance";
    fs::create_directories(g_out);

    std::vector<Criterion> criteria = {
        {1, "cumulant-formula oracle and Bell numbers", criterion_cumulant_oracle},
        {2, "exactness at top order vs reference solvers", criterion_top_order_exact},
        {3, std::string("convergence-table trend (") + (g_full ? "N=6 full" : "N=5 CI") +
                " variant)",
         criterion_table_trend},
        {4, "mean field matches at d/lambda = 1", criterion_good_regime},
        {5, "omega=21: higher order no better than mean field", criterion_bad_regime},
        {6, "omega=15: second order erratic, sweep survives", criterion_ugly_regime},
        {7, "exact-solver physics invariants", criterion_physics_invariants},
        {8, "coupling formulas vs independent evaluation", criterion_couplings},
        {9, "determinism and sidecar provenance", criterion_provenance},
    };

    int failures = 0;
    for (auto& c : criteria) {
        std::string detail;
        bool pass = false;
        try {
            pass = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %d: %s :: %s\n", pass ? "PASS" : "FAIL", c.number,
                    c.label.c_str(), detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
    return failures;
}
