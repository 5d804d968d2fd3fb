#include "cem/runner.hpp"

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "cem/dense.hpp"
#include "cem/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cem {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    fs::create_directories(fs::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

json integrator_json(const IntegratorConfig& c) {
    return json{{"method", c.method},
                {"rel_tol", c.rel_tol},
                {"abs_tol", c.abs_tol},
                {"max_step", c.max_step},
                {"divergence_bound", c.divergence_bound},
                {"parallel_rhs", c.parallel_rhs}};
}

IntegratorConfig integrator_from_json(const json& j) {
    IntegratorConfig c;
    c.method = j.value("method", c.method);
    c.rel_tol = j.value("rel_tol", c.rel_tol);
    c.abs_tol = j.value("abs_tol", c.abs_tol);
    c.max_step = j.value("max_step", c.max_step);
    c.divergence_bound = j.value("divergence_bound", c.divergence_bound);
    c.parallel_rhs = j.value("parallel_rhs", c.parallel_rhs);
    return c;
}

json config_json(const RunConfig& cfg) {
    json j;
    j["name"] = cfg.resolved_name();
    j["model"] = cfg.model;
    j["chain"] = {{"n", cfg.chain.n},
                  {"d_over_lambda", cfg.chain.d_over_lambda},
                  {"gamma", cfg.chain.gamma},
                  {"eta_over_gamma", cfg.chain.eta_over_gamma},
                  {"omega0", cfg.chain.omega0},
                  {"t_total", cfg.chain.t_total},
                  {"t_off", cfg.chain.t_off}};
    j["biprime"] = {{"omega", cfg.biprime.omega},
                    {"k", cfg.biprime.k},
                    {"l", cfg.biprime.l},
                    {"xi", cfg.biprime.xi},
                    {"t_total", cfg.biprime.t_total},
                    {"hbar_omega", cfg.biprime.hbar_omega}};
    j["orders"] = cfg.orders;
    j["exact"] = cfg.exact;
    j["grid_points"] = cfg.grid_points;
    j["integrator"] = integrator_json(cfg.integrator);
    j["conjugate_reduction"] = cfg.conjugate_reduction;
    j["workers"] = cfg.workers;
    if (cfg.sweep) j["sweep"] = {{"axis", cfg.sweep->axis}, {"values", cfg.sweep->values}};
    j["output_dir"] = cfg.output_dir;
    j["cache_dir"] = cfg.cache_dir;
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    cfg.name = j.value("name", std::string{});
    cfg.model = j.value("model", cfg.model);
    if (j.contains("chain")) {
        const auto& c = j.at("chain");
        cfg.chain.n = c.value("n", cfg.chain.n);
        cfg.chain.d_over_lambda = c.value("d_over_lambda", cfg.chain.d_over_lambda);
        cfg.chain.gamma = c.value("gamma", cfg.chain.gamma);
        cfg.chain.eta_over_gamma = c.value("eta_over_gamma", cfg.chain.eta_over_gamma);
        cfg.chain.omega0 = c.value("omega0", cfg.chain.omega0);
        cfg.chain.t_total = c.value("t_total", cfg.chain.t_total);
        cfg.chain.t_off = c.value("t_off", cfg.chain.t_off);
    }
    if (j.contains("biprime")) {
        const auto& b = j.at("biprime");
        cfg.biprime.omega = b.value("omega", cfg.biprime.omega);
        cfg.biprime.k = b.value("k", cfg.biprime.k);
        cfg.biprime.l = b.value("l", cfg.biprime.l);
        cfg.biprime.xi = b.value("xi", cfg.biprime.xi);
        cfg.biprime.t_total = b.value("t_total", cfg.biprime.t_total);
        cfg.biprime.hbar_omega = b.value("hbar_omega", cfg.biprime.hbar_omega);
    }
    if (j.contains("orders")) cfg.orders = j.at("orders").get<std::vector<int>>();
    cfg.exact = j.value("exact", cfg.exact);
    cfg.grid_points = j.value("grid_points", cfg.grid_points);
    if (j.contains("integrator")) cfg.integrator = integrator_from_json(j.at("integrator"));
    cfg.conjugate_reduction = j.value("conjugate_reduction", cfg.conjugate_reduction);
    cfg.workers = j.value("workers", cfg.workers);
    if (j.contains("sweep") && !j.at("sweep").is_null()) {
        RunConfig::Sweep s;
        s.axis = j.at("sweep").value("axis", std::string{});
        s.values = j.at("sweep").value("values", std::vector<double>{});
        cfg.sweep = s;
    }
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    cfg.cache_dir = j.value("cache_dir", cfg.cache_dir);
    return cfg;
}

struct ModelSetup {
    SystemSpec system;
    ProductStateSpec initial;
    std::vector<double> grid_t;    // integration time
    std::vector<double> grid_chi;  // reported time (Gamma*t or s)
    int n_sites;
    int layout_k = 0, layout_l = 0;  // biprime
};

ModelSetup build_model(const RunConfig& cfg) {
    if (cfg.model == "chain") {
        const auto& p = cfg.chain;
        ModelSetup m{build_chain_system(p), ProductStateSpec::all_ground(p.n),
                     uniform_grid(0.0, p.t_total / p.gamma, cfg.grid_points + 1),
                     uniform_grid(0.0, p.t_total, cfg.grid_points + 1), p.n};
        return m;
    }
    if (cfg.model == "biprime") {
        const auto& p = cfg.biprime;
        SystemSpec sys = build_biprime_system(p);
        BitLayout lay = biprime_bit_layout(p.omega);
        if (p.k != 0) {
            lay.k = p.k;
            lay.l = p.l;
            lay.n = p.k + p.l;
        }
        ModelSetup m{std::move(sys), ProductStateSpec::all_plus(lay.n),
                     uniform_grid(0.0, p.t_total, cfg.grid_points + 1),
                     uniform_grid(0.0, 1.0, cfg.grid_points + 1), lay.n};
        m.layout_k = lay.k;
        m.layout_l = lay.l;
        return m;
    }
    throw std::invalid_argument("unknown model '" + cfg.model + "' (chain|biprime)");
}

void relabel_grid(Trajectory& traj, const ModelSetup& m) {
    const double scale = m.grid_chi.back() / m.grid_t.back();
    traj.grid = m.grid_chi;
    traj.stopped_at *= scale;
    if (traj.first_violation) traj.first_violation->time *= scale;
}

MomentODESystem derive_or_load(const RunConfig& cfg, const ModelSetup& m, int order) {
    ClosureOptions opt{order, cfg.conjugate_reduction, true};
    if (cfg.cache_dir.empty()) return generate_closed_system(m.system, opt);
    const std::string key = m.system.describe() + "order=" + std::to_string(order) +
                            " reduced=" + std::to_string(opt.conjugate_reduction);
    const fs::path file = fs::path(cfg.cache_dir) / (hex64(fnv1a(key)) + ".eqsys");
    if (fs::exists(file)) {
        try {
            return parse_moment_system(read_file(file.string()));
        } catch (const std::exception&) {
            // stale or corrupt cache entry: fall through to a fresh derivation
        }
    }
    MomentODESystem sys = generate_closed_system(m.system, opt);
    write_file(file.string(), serialize(sys));
    return sys;
}

Trajectory run_exact(const RunConfig& cfg, const ModelSetup& m) {
    if (cfg.model == "chain") {
        const Eigen::VectorXcd psi = product_state_vector(m.initial.sites);
        const Eigen::MatrixXcd rho0 = psi * psi.adjoint();
        return solve_master_equation(m.system, rho0, m.grid_t, cfg.integrator);
    }
    return solve_schrodinger(m.system, product_state_vector(m.initial.sites), m.grid_t,
                             cfg.integrator);
}

std::vector<std::pair<std::string, int>> error_axes(const RunConfig& cfg, int n_sites) {
    std::vector<std::pair<std::string, int>> axes;
    if (cfg.model == "chain") {
        for (const char* k : {"22", "z", "x"}) axes.emplace_back(k, 0);
    } else {
        for (int mSite = 1; mSite <= n_sites; ++mSite) axes.emplace_back("22", mSite);
    }
    return axes;
}

std::string error_table_csv(const RunConfig& cfg, const ScenarioResult& res) {
    std::ostringstream out;
    const auto axes = error_axes(cfg, res.n_sites);
    out << "order,status,valid_points,total_points";
    for (const auto& [obs, site] : axes) {
        out << ",delta_" << obs;
        if (site > 0) out << "_" << site;
    }
    out << "\n";
    for (const auto& run : res.runs) {
        if (run.is_exact) continue;
        out << run.order << "," << status_name(run.trajectory.status);
        if (run.errors.empty()) {
            out << ",,";
            for (std::size_t i = 0; i < axes.size(); ++i) out << ",";
        } else {
            out << "," << run.errors.front().valid_points << ","
                << run.errors.front().total_points;
            for (const auto& e : run.errors) out << "," << format_double(e.total);
        }
        out << "\n";
    }
    return out.str();
}

std::string scenario_report(const RunConfig& cfg, const ScenarioResult& res) {
    std::ostringstream out;
    out << "run " << cfg.resolved_name() << " (model " << cfg.model << ", N=" << res.n_sites
        << ", M=" << cfg.grid_points << ")\n";
    for (const auto& run : res.runs) {
        if (run.is_exact)
            out << "[exact]";
        else
            out << "[o=" << run.order << "]";
        out << " status=" << status_name(run.trajectory.status);
        if (!run.trajectory.completed())
            out << " stopped_at=" << format_double(run.trajectory.stopped_at) << " ("
                << run.trajectory.failure_reason << ")";
        if (!run.is_exact)
            out << " vars=" << run.variables << " keys=" << run.discovered << "/"
                << run.upper_bound;
        out << " wall=" << format_double(run.wall_seconds) << "s\n";
        if (run.trajectory.first_violation)
            out << "    physicality: " << run.trajectory.first_violation->what
                << " first at t=" << format_double(run.trajectory.first_violation->time)
                << " (reported only)\n";
        for (const auto& e : run.errors) {
            out << "    delta_" << e.observable;
            if (e.site > 0) out << "[" << e.site << "]";
            out << " = " << format_double(e.total);
            if (e.truncated)
                out << " over " << e.valid_points << "/" << e.total_points
                    << " points (diverged; saturated cap "
                    << format_double(e.saturated(cfg.integrator.divergence_bound)) << ")";
            out << "\n";
        }
        if (run.readout_attempted) {
            if (run.readout.refused) {
                out << "    bits: read-out refused: " << run.readout.reason << "\n";
            } else {
                out << "    bits: [";
                for (std::size_t i = 0; i < run.readout.bits.size(); ++i) {
                    if (i) out << ",";
                    out << run.readout.bits[i];
                }
                out << "] a=" << run.readout.a << " b=" << run.readout.b
                    << (run.readout.valid ? " valid" : " INVALID") << "\n";
            }
        }
    }
    return out.str();
}

json sidecar_json(const RunConfig& cfg, const ModelSetup& m, const OrderRun& run) {
    json j;
    j["format"] = "cemsim-meta/1";
    j["config"] = config_json(cfg);
    json r;
    r["order"] = run.is_exact ? json("exact") : json(run.order);
    r["status"] = status_name(run.trajectory.status);
    if (!run.trajectory.completed()) {
        r["stopped_at"] = run.trajectory.stopped_at;
        r["reason"] = run.trajectory.failure_reason;
    }
    r["valid_points"] = run.trajectory.valid_points;
    r["wall_seconds"] = run.wall_seconds;
    if (!run.is_exact) {
        r["variables"] = run.variables;
        r["discovered_keys"] = run.discovered;
        r["upper_bound"] = run.upper_bound;
    }
    if (run.trajectory.first_violation)
        r["first_physicality_violation"] = {{"time", run.trajectory.first_violation->time},
                                            {"what", run.trajectory.first_violation->what}};
    r["n_sites"] = m.n_sites;
    j["run"] = r;
    j["trajectory_file"] = fs::path(run.trajectory_path).filename().string();
    return j;
}

std::string couplings_csv(const DipoleChainParams& p) {
    const DipoleCouplings c = dipole_couplings(p);
    std::ostringstream out;
    out << "i,j,omega_ij,gamma_ij\n";
    for (int i = 0; i < p.n; ++i)
        for (int j = 0; j < p.n; ++j)
            out << (i + 1) << "," << (j + 1) << "," << format_double(c.omega(i, j)) << ","
                << format_double(c.gamma(i, j)) << "\n";
    return out.str();
}

}  // namespace

void RunConfig::validate() const {
    if (model != "chain" && model != "biprime")
        throw std::invalid_argument("model must be 'chain' or 'biprime', got '" + model +
                                    "'");
    if (model == "chain") chain.validate();
    if (model == "biprime") biprime.validate();
    const int n = n_sites();
    if (orders.empty() && !exact)
        throw std::invalid_argument("nothing to run: no orders and no exact reference");
    for (int o : orders)
        if (o < 1 || o > n)
            throw std::invalid_argument("order " + std::to_string(o) +
                                        " outside [1, N=" + std::to_string(n) + "]");
    if (grid_points < 2) throw std::invalid_argument("grid_points must be at least 2");
    if (integrator.rel_tol <= 0 || integrator.abs_tol <= 0)
        throw std::invalid_argument("tolerances must be positive");
    if (integrator.divergence_bound <= 1)
        throw std::invalid_argument("divergence_bound must exceed 1");
    if (sweep) {
        if (model != "chain")
            throw std::invalid_argument("sweeps are defined for the chain model");
        if (sweep->axis != "d_over_lambda" && sweep->axis != "eta_over_gamma")
            throw std::invalid_argument("sweep axis must be d_over_lambda or eta_over_gamma");
        if (sweep->values.empty())
            throw std::invalid_argument("sweep axis needs at least one value");
    }
    if (output_dir.empty()) throw std::invalid_argument("output_dir must not be empty");
}

int RunConfig::n_sites() const {
    if (model == "chain") return chain.n;
    BitLayout lay = biprime_bit_layout(biprime.omega);
    return biprime.k != 0 ? biprime.k + biprime.l : lay.n;
}

std::string RunConfig::resolved_name() const {
    if (!name.empty()) return name;
    if (model == "chain") return "chain_N" + std::to_string(chain.n);
    return "biprime_w" + std::to_string(biprime.omega);
}

std::string RunConfig::to_json_text() const { return config_json(*this).dump(2) + "\n"; }

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

const OrderRun* ScenarioResult::find(int order, bool exact) const {
    for (const auto& r : runs)
        if (r.is_exact == exact && (exact || r.order == order)) return &r;
    return nullptr;
}

ScenarioResult run_scenario(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.workers > 0) omp_set_num_threads(cfg.workers);
    const ModelSetup m = build_model(cfg);

    ScenarioResult res;
    res.config = cfg;
    res.n_sites = m.n_sites;
    const fs::path out_dir(cfg.output_dir);
    fs::create_directories(out_dir);
    const std::string prefix = cfg.resolved_name();

    if (cfg.model == "chain")
        write_file((out_dir / (prefix + "_couplings.csv")).string(), couplings_csv(cfg.chain));

    res.runs.reserve(cfg.orders.size() + 1);  // pointers into runs stay valid
    const Trajectory* exact_traj = nullptr;
    if (cfg.exact) {
        OrderRun run;
        run.is_exact = true;
        const double tic = omp_get_wtime();
        run.trajectory = run_exact(cfg, m);
        run.wall_seconds = omp_get_wtime() - tic;
        relabel_grid(run.trajectory, m);
        if (cfg.model == "biprime") {
            run.readout = read_bits(run.trajectory, m.layout_k, m.layout_l, cfg.biprime.omega);
            run.readout_attempted = true;
        }
        run.trajectory_path = (out_dir / (prefix + "_exact_traj.csv")).string();
        res.runs.push_back(std::move(run));
        exact_traj = &res.runs.back().trajectory;
    }

    for (int order : cfg.orders) {
        OrderRun run;
        run.order = order;
        const double tic = omp_get_wtime();
        MomentODESystem sys = derive_or_load(cfg, m, order);
        run.variables = sys.size();
        run.discovered = sys.count_discovered;
        run.upper_bound = sys.count_upper_bound;
        const Eigen::VectorXcd init = initial_moments(m.initial, sys);
        run.trajectory = integrate_moments(sys, init, m.grid_t, cfg.integrator);
        run.wall_seconds = omp_get_wtime() - tic;
        relabel_grid(run.trajectory, m);

        if (exact_traj) {
            for (const auto& [obs, site] : error_axes(cfg, m.n_sites)) {
                ErrorSeries series =
                    squared_difference(run.trajectory, *exact_traj, obs, site, m.n_sites);
                series.order = order;
                run.errors.push_back(cumulative_error(series));
            }
        }
        if (cfg.model == "biprime") {
            run.readout = read_bits(run.trajectory, m.layout_k, m.layout_l, cfg.biprime.omega);
            run.readout_attempted = true;
        }
        run.trajectory_path =
            (out_dir / (prefix + "_o" + std::to_string(order) + "_traj.csv")).string();
        res.runs.push_back(std::move(run));
    }

    // write artifacts (trajectories, sidecars, error table, report)
    for (auto& run : res.runs) {
        write_file(run.trajectory_path, trajectory_csv(run.trajectory));
        const std::string meta_name =
            run.is_exact ? prefix + "_exact_meta.json"
                         : prefix + "_o" + std::to_string(run.order) + "_meta.json";
        run.sidecar_path = (out_dir / meta_name).string();
        write_file(run.sidecar_path, sidecar_json(cfg, m, run).dump(2) + "\n");
    }
    if (exact_traj) {
        res.table_path = (out_dir / (prefix + "_errors.csv")).string();
        write_file(res.table_path, error_table_csv(cfg, res));
    }
    res.report_path = (out_dir / (prefix + "_report.txt")).string();
    write_file(res.report_path, scenario_report(cfg, res));
    return res;
}

SweepResult run_sweep(const RunConfig& cfg) {
    cfg.validate();
    if (!cfg.sweep) throw std::invalid_argument("sweep config missing the sweep axis");
    if (cfg.workers > 0) omp_set_num_threads(cfg.workers);

    struct Cell {
        double axis_value;
        int order;  // 0 = exact
        bool is_exact;
    };
    std::vector<Cell> cells;
    for (double v : cfg.sweep->values) {
        for (int o : cfg.orders) cells.push_back({v, o, false});
        if (cfg.exact) cells.push_back({v, 0, true});
    }

    struct CellOut {
        Trajectory traj;
        std::string note;
    };
    std::vector<CellOut> outs(cells.size());

    const std::int64_t n_cells = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < n_cells; ++c) {
        RunConfig point = cfg;
        point.sweep.reset();
        if (cfg.sweep->axis == "d_over_lambda")
            point.chain.d_over_lambda = cells[c].axis_value;
        else
            point.chain.eta_over_gamma = cells[c].axis_value;
        try {
            const ModelSetup m = build_model(point);
            Trajectory traj;
            if (cells[c].is_exact) {
                traj = run_exact(point, m);
            } else {
                MomentODESystem sys = derive_or_load(point, m, cells[c].order);
                traj = integrate_moments(sys, initial_moments(m.initial, sys), m.grid_t,
                                         point.integrator);
            }
            relabel_grid(traj, m);
            outs[c].traj = std::move(traj);
        } catch (const std::exception& e) {
            outs[c].note = e.what();
            outs[c].traj.status = Trajectory::Status::SolverFailure;
            outs[c].traj.failure_reason = e.what();
        }
    }

    SweepResult res;
    res.config = cfg;
    const fs::path out_dir(cfg.output_dir);
    fs::create_directories(out_dir);
    const std::string prefix = cfg.resolved_name() + "_sweep_" + cfg.sweep->axis;

    std::ostringstream csv;
    csv << cfg.sweep->axis << ",time,order,mean_s22\n";
    std::ostringstream report;
    report << "sweep " << cfg.resolved_name() << " axis=" << cfg.sweep->axis << " cells="
           << cells.size() << "\n";
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto& cell = cells[c];
        const auto& out = outs[c];
        SweepCell sc;
        sc.axis_value = cell.axis_value;
        sc.order = cell.order;
        sc.is_exact = cell.is_exact;
        sc.status = out.traj.status;
        sc.note = out.note;
        res.cells.push_back(sc);

        const std::string order_label = cell.is_exact ? "exact" : std::to_string(cell.order);
        report << "  " << cfg.sweep->axis << "=" << format_double(cell.axis_value)
               << " o=" << order_label << " status=" << status_name(out.traj.status);
        if (!out.note.empty()) report << " (" << out.note << ")";
        report << "\n";
        if (out.traj.grid.empty()) continue;
        const auto mean = out.traj.real_observable("22", 0, cfg.chain.n);
        for (std::size_t i = 0; i < out.traj.valid_points; ++i)
            csv << format_double(cell.axis_value) << "," << format_double(out.traj.grid[i])
                << "," << order_label << "," << format_double(mean[i]) << "\n";
    }

    res.csv_path = (out_dir / (prefix + ".csv")).string();
    write_file(res.csv_path, csv.str());
    res.report_path = (out_dir / (prefix + "_report.txt")).string();
    write_file(res.report_path, report.str());
    json meta;
    meta["format"] = "cemsim-meta/1";
    meta["config"] = config_json(cfg);
    meta["sweep_file"] = fs::path(res.csv_path).filename().string();
    write_file((out_dir / (prefix + "_meta.json")).string(), meta.dump(2) + "\n");
    return res;
}

std::string derive_equations(const RunConfig& cfg, int order) {
    cfg.validate();
    const ModelSetup m = build_model(cfg);
    return serialize(
        generate_closed_system(m.system, {order, cfg.conjugate_reduction, true}));
}

std::string recompute_table(const std::string& model, const std::string& exact_csv_path,
                            const std::vector<std::pair<int, std::string>>& order_csv_paths) {
    const Trajectory exact = trajectory_from_csv(read_file(exact_csv_path));
    int n_sites = 0;
    for (const auto& [key, unused] : exact.series) {
        (void)unused;
        const auto lb = key.find('[');
        if (lb != std::string::npos)
            n_sites = std::max(n_sites, std::stoi(key.substr(lb + 1)));
    }

    std::ostringstream out;
    std::vector<std::pair<std::string, int>> axes;
    if (model == "chain") {
        for (const char* k : {"22", "z", "x"}) axes.emplace_back(k, 0);
    } else {
        for (int mSite = 1; mSite <= n_sites; ++mSite) axes.emplace_back("22", mSite);
    }
    out << "order,status,valid_points,total_points";
    for (const auto& [obs, site] : axes) {
        out << ",delta_" << obs;
        if (site > 0) out << "_" << site;
    }
    out << "\n";
    for (const auto& [order, path] : order_csv_paths) {
        const Trajectory approx = trajectory_from_csv(read_file(path));
        out << order << "," << status_name(approx.status);
        bool first = true;
        for (const auto& [obs, site] : axes) {
            ErrorSeries series = squared_difference(approx, exact, obs, site, n_sites);
            series.order = order;
            const ErrorSummary sum = cumulative_error(series);
            if (first) {
                out << "," << sum.valid_points << "," << sum.total_points;
                first = false;
            }
            out << "," << format_double(sum.total);
        }
        out << "\n";
    }
    return out.str();
}

RunConfig config_from_sidecar(const std::string& sidecar_path) {
    json j;
    try {
        j = json::parse(read_file(sidecar_path));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("sidecar is not valid JSON: ") + e.what());
    }
    if (!j.contains("config"))
        throw std::invalid_argument("sidecar has no embedded config: " + sidecar_path);
    return config_from_json(j.at("config"));
}

}  // namespace cem
