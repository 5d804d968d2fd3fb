// Command-line front end: run scenarios, sweep parameter axes, dump derived
// equation systems, and recompute error tables from trajectory files.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "cem/runner.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonFlags {
    std::string config_path;
    std::string sidecar_path;
    std::string name;
    std::string model;
    std::string out_dir;
    std::string cache_dir;
    std::vector<int> orders;
    int exact = -1;  // tri-state: unset/-1, off/0, on/1
    long grid = -1;
    double rel_tol = -1, abs_tol = -1, div_bound = -1, max_step = -1;
    std::string method;
    int workers = -1;
    int no_reduction = 0;
    // chain
    int n = -1;
    double d_over_lambda = -1, eta_over_gamma = -1, gamma = -1, t_total = -1, t_off = -1;
    double omega0 = std::numeric_limits<double>::quiet_NaN();
    // biprime
    long long omega = -1;
    double xi = std::numeric_limits<double>::quiet_NaN(), hbar_omega = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file");
    cmd->add_option("--name", f.name, "output file prefix");
    cmd->add_option("--model", f.model, "chain | biprime");
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--cache", f.cache_dir, "equation-system cache directory");
    cmd->add_option("--orders", f.orders, "cumulant orders to run")->delimiter(',');
    cmd->add_flag_callback("--exact", [&f] { f.exact = 1; },
                           "run the exact reference solver (default)");
    cmd->add_flag_callback("--no-exact", [&f] { f.exact = 0; },
                           "skip the exact reference solver");
    cmd->add_option("--grid", f.grid, "number of output intervals M");
    cmd->add_option("--rel-tol", f.rel_tol, "integrator relative tolerance");
    cmd->add_option("--abs-tol", f.abs_tol, "integrator absolute tolerance");
    cmd->add_option("--div-bound", f.div_bound, "divergence magnitude ceiling");
    cmd->add_option("--max-step", f.max_step, "maximum step size (required for rk4)");
    cmd->add_option("--method", f.method, "integrator: dopri5 | rk4");
    cmd->add_option("--workers", f.workers, "OpenMP thread cap (0 = runtime default)");
    cmd->add_flag("--no-conjugate-reduction", f.no_reduction,
                  "integrate conjugate moment pairs independently");
    cmd->add_option("--n", f.n, "chain: emitter count");
    cmd->add_option("--d-over-lambda", f.d_over_lambda, "chain: spacing in wavelengths");
    cmd->add_option("--eta-over-gamma", f.eta_over_gamma, "chain: drive strength");
    cmd->add_option("--gamma", f.gamma, "chain: single-emitter decay rate");
    cmd->add_option("--omega0", f.omega0, "chain: transition frequency in the sim frame");
    cmd->add_option("--t-total", f.t_total, "total evolution time");
    cmd->add_option("--t-off", f.t_off, "chain: drive switch-off time");
    cmd->add_option("--omega", f.omega, "biprime: odd semiprime to factor");
    cmd->add_option("--xi", f.xi, "biprime: transverse field strength");
    cmd->add_option("--hbar-omega", f.hbar_omega, "biprime: cost Hamiltonian scale");
}

cem::RunConfig resolve(const CommonFlags& f) {
    cem::RunConfig cfg;
    if (!f.sidecar_path.empty())
        cfg = cem::config_from_sidecar(f.sidecar_path);
    else if (!f.config_path.empty())
        cfg = cem::RunConfig::from_json_text(slurp(f.config_path));

    if (!f.name.empty()) cfg.name = f.name;
    if (!f.model.empty()) cfg.model = f.model;
    if (!f.out_dir.empty()) cfg.output_dir = f.out_dir;
    if (!f.cache_dir.empty()) cfg.cache_dir = f.cache_dir;
    if (!f.orders.empty()) cfg.orders = f.orders;
    if (f.exact >= 0) cfg.exact = f.exact > 0;
    if (f.grid >= 0) cfg.grid_points = static_cast<std::size_t>(f.grid);
    if (f.rel_tol >= 0) cfg.integrator.rel_tol = f.rel_tol;
    if (f.abs_tol >= 0) cfg.integrator.abs_tol = f.abs_tol;
    if (f.div_bound >= 0) cfg.integrator.divergence_bound = f.div_bound;
    if (f.max_step >= 0) cfg.integrator.max_step = f.max_step;
    if (!f.method.empty()) cfg.integrator.method = f.method;
    if (f.workers >= 0) cfg.workers = f.workers;
    if (f.no_reduction) cfg.conjugate_reduction = false;
    if (f.n >= 0) cfg.chain.n = f.n;
    if (f.d_over_lambda >= 0) cfg.chain.d_over_lambda = f.d_over_lambda;
    if (f.eta_over_gamma >= 0) cfg.chain.eta_over_gamma = f.eta_over_gamma;
    if (f.gamma >= 0) cfg.chain.gamma = f.gamma;
    if (!std::isnan(f.omega0)) cfg.chain.omega0 = f.omega0;
    if (f.t_total >= 0) {
        cfg.chain.t_total = f.t_total;
        cfg.biprime.t_total = f.t_total;
    }
    if (f.t_off >= 0) cfg.chain.t_off = f.t_off;
    if (f.omega >= 0) cfg.biprime.omega = f.omega;
    if (!std::isnan(f.xi)) cfg.biprime.xi = f.xi;
    if (f.hbar_omega >= 0) cfg.biprime.hbar_omega = f.hbar_omega;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cumulant-expansion simulator for interacting two-level systems"};
    app.require_subcommand(1);

    CommonFlags run_flags, sweep_flags, derive_flags;
    std::string sweep_axis;
    std::vector<double> sweep_values;
    int derive_order = 1;
    std::string derive_out;

    auto* run_cmd = app.add_subcommand("run", "run one scenario (orders + exact reference)");
    add_common(run_cmd, run_flags);
    run_cmd->add_option("--from-sidecar", run_flags.sidecar_path,
                        "rerun the configuration embedded in a metadata sidecar");

    auto* sweep_cmd = app.add_subcommand("sweep", "run a chain parameter-axis sweep");
    add_common(sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--axis", sweep_axis, "d_over_lambda | eta_over_gamma");
    sweep_cmd->add_option("--values", sweep_values, "axis values")->delimiter(',');
    sweep_cmd->add_option("--from-sidecar", sweep_flags.sidecar_path,
                          "rerun the configuration embedded in a metadata sidecar");

    auto* derive_cmd =
        app.add_subcommand("derive", "derive and print the closed equation system");
    add_common(derive_cmd, derive_flags);
    derive_cmd->add_option("--order", derive_order, "closure order")->required();
    derive_cmd->add_option("--out-file", derive_out, "write to file instead of stdout");

    auto* table_cmd =
        app.add_subcommand("table", "recompute an error table from trajectory CSVs");
    std::string table_model = "chain", table_exact, table_out;
    std::vector<std::string> table_approx;
    table_cmd->add_option("--model", table_model, "chain | biprime");
    table_cmd->add_option("--exact-csv", table_exact, "reference trajectory CSV")->required();
    table_cmd->add_option("--approx", table_approx, "order=path pairs (repeatable)")
        ->required();
    table_cmd->add_option("--out-file", table_out, "write to file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const auto res = cem::run_scenario(resolve(run_flags));
            std::cout << slurp(res.report_path);
        } else if (sweep_cmd->parsed()) {
            cem::RunConfig cfg = resolve(sweep_flags);
            if (!sweep_axis.empty() || !sweep_values.empty()) {
                cem::RunConfig::Sweep s;
                s.axis = sweep_axis;
                s.values = sweep_values;
                cfg.sweep = s;
            }
            const auto res = cem::run_sweep(cfg);
            std::cout << slurp(res.report_path);
        } else if (derive_cmd->parsed()) {
            const std::string text = cem::derive_equations(resolve(derive_flags), derive_order);
            if (derive_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(derive_out, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + derive_out);
                out << text;
            }
        } else if (table_cmd->parsed()) {
            std::vector<std::pair<int, std::string>> approx;
            for (const auto& spec : table_approx) {
                const auto eq = spec.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("--approx expects order=path, got " + spec);
                approx.emplace_back(std::stoi(spec.substr(0, eq)), spec.substr(eq + 1));
            }
            const std::string text = cem::recompute_table(table_model, table_exact, approx);
            if (table_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(table_out, std::ios::binary);
                if (!out) throw std::runtime_error("cannot write " + table_out);
                out << text;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
