// Command-line front end: solve / lift / poincare / vlasov-check / convergence.
// Exit codes: 0 success, 2 config or usage error, 3 bound violation,
// 4 solver non-convergence.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stils/csv.hpp"
#include "stils/lifting.hpp"
#include "stils/poincare.hpp"
#include "stils/solver.hpp"
#include "stils/vlasov.hpp"

using nlohmann::json;
using namespace stils;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBound = 3;
constexpr int kExitNoConvergence = 4;

bool g_quiet = false;

void say(const std::string& line) {
    if (!g_quiet) std::cout << line << "\n";
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json cfg;
    in >> cfg;
    return cfg;
}

geometry::SpaceDomain parse_domain(const json& j) {
    geometry::SpaceDomain d;
    auto lower = j.at("lower").get<std::vector<double>>();
    auto upper = j.at("upper").get<std::vector<double>>();
    if (lower.size() != upper.size() || lower.empty() || lower.size() > 2)
        throw std::runtime_error("domain bounds must have 1 or 2 axes");
    d.dim = static_cast<int>(lower.size());
    for (int i = 0; i < d.dim; ++i) {
        d.lower[i] = lower[i];
        d.upper[i] = upper[i];
    }
    d.validate();
    return d;
}

geometry::SpaceTimeGrid parse_grid(const json& cfg) {
    auto domain = parse_domain(cfg.at("domain"));
    return geometry::build_grid(cfg.at("T").get<double>(), domain,
                                cfg.at("nt").get<int>(),
                                cfg.at("nx").get<std::vector<int>>());
}

solver::TransportCase parse_case(const json& cfg) {
    solver::TransportCase tc;
    tc.grid = parse_grid(cfg);
    tc.v = cfg.at("v").get<std::vector<double>>();
    tc.G = expr::parse(cfg.value("G", "0"));
    tc.u0 = expr::parse(cfg.value("u0", "0"));
    tc.ub = expr::parse(cfg.value("ub", "0"));
    tc.cfg.tolerance = cfg.value("tolerance", 1e-10);
    tc.cfg.max_iterations = cfg.value("max_iterations", 0);
    tc.quad_order = cfg.value("quad_order", 2);
    return tc;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

std::string solution_csv(const geometry::SpaceTimeGrid& grid,
                         const transport::Vector& u, const transport::Vector& f,
                         const transport::Vector& g) {
    std::string out = grid.dim() == 2 ? "t,x,y,u,f,g\n" : "t,x,u,f,g\n";
    auto npa = grid.nodes_per_axis();
    for (int it = 0; it < npa[0]; ++it)
        for (int i0 = 0; i0 < npa[1]; ++i0)
            for (int i1 = 0; i1 < npa[2]; ++i1) {
                auto c = grid.node_coords(it, i0, i1);
                int idx = grid.node_index(it, i0, i1);
                std::vector<std::string> cells{csv::format(c[0]), csv::format(c[1])};
                if (grid.dim() == 2) cells.push_back(csv::format(c[2]));
                cells.push_back(csv::format(u[idx]));
                cells.push_back(csv::format(f[idx]));
                cells.push_back(csv::format(g[idx]));
                out += csv::row(cells);
            }
    return out;
}

int cmd_solve(const std::string& config_path, const std::string& out_override) {
    json cfg = load_config(config_path);
    auto tc = parse_case(cfg);
    auto res = solver::solve_transport(tc);
    auto stab = solver::stability_check(res.f, res.l2_G, tc.grid.T);

    std::string out_path = !out_override.empty() ? out_override
                                                 : cfg.value("out", std::string("solution.csv"));
    write_file(out_path, solution_csv(tc.grid, res.u, res.f.f, res.g.coefficients));

    json summary = {
        {"l2_f", res.f.l2_f},          {"l2_G", res.l2_G},
        {"l2_misfit", res.f.l2_misfit}, {"ratio", stab.ratio},
        {"bound", 2.0 * tc.grid.T},    {"iterations", res.f.iterations},
        {"pass", stab.pass},
    };
    write_file(cfg.value("summary", std::string("summary.json")), summary.dump(2) + "\n");

    say("l2_f=" + csv::format(res.f.l2_f) + " l2_G=" + csv::format(res.l2_G) +
        " ratio=" + csv::format(stab.ratio) + " bound=" + csv::format(2.0 * tc.grid.T) +
        (stab.pass ? " PASS" : " FAIL"));
    return stab.pass ? kExitOk : kExitBound;
}

int cmd_lift(const std::string& config_path, const std::string& out_override) {
    json cfg = load_config(config_path);
    auto grid = parse_grid(cfg);
    auto v = cfg.at("v").get<std::vector<double>>();
    auto u0 = expr::parse(cfg.value("u0", "0"));
    auto ub = expr::parse(cfg.value("ub", "0"));

    auto g = lifting::lift(u0, ub, v, grid);
    auto rep = lifting::linf_bound_check(g, u0, ub, v, grid);

    std::string out_path = !out_override.empty() ? out_override
                                                 : cfg.value("out", std::string("lift.csv"));
    std::string out = grid.dim() == 2 ? "t,x,y,g\n" : "t,x,g\n";
    auto npa = grid.nodes_per_axis();
    for (int it = 0; it < npa[0]; ++it)
        for (int i0 = 0; i0 < npa[1]; ++i0)
            for (int i1 = 0; i1 < npa[2]; ++i1) {
                auto c = grid.node_coords(it, i0, i1);
                std::vector<std::string> cells{csv::format(c[0]), csv::format(c[1])};
                if (grid.dim() == 2) cells.push_back(csv::format(c[2]));
                cells.push_back(csv::format(g.coefficients[grid.node_index(it, i0, i1)]));
                out += csv::row(cells);
            }
    write_file(out_path, out);

    say("max|g|=" + csv::format(rep.max_abs_g) + " bound=" + csv::format(rep.bound) +
        (rep.pass ? " PASS" : " FAIL"));
    return rep.pass ? kExitOk : kExitBound;
}

int poincare_one(double T, const std::vector<double>& v, int nt,
                 const std::vector<int>& nx, unsigned seed, std::string* csv_row) {
    geometry::SpaceDomain dom;
    dom.dim = static_cast<int>(nx.size());
    for (int i = 0; i < dom.dim; ++i) {
        dom.lower[i] = 0.0;
        dom.upper[i] = 1.0;
    }
    auto grid = geometry::build_grid(T, dom, nt, nx);
    poincare::EigenConfig ecfg;
    ecfg.seed = seed;
    auto res = poincare::discrete_constant(grid, v, ecfg);
    bool pass = res.C_h <= 2.0 * T * (1.0 + 1e-10);

    if (csv_row) {
        std::vector<std::string> cells{csv::format(v[0]),
                                       csv::format(T),
                                       std::to_string(nt),
                                       std::to_string(nx[0]),
                                       csv::format(res.lambda_min),
                                       csv::format(res.C_h),
                                       csv::format(2.0 * T),
                                       pass ? "1" : "0"};
        *csv_row = csv::row(cells);
    }
    say("T=" + csv::format(T) + " v=" + csv::format(v[0]) + " nt=" + std::to_string(nt) +
        " nx=" + std::to_string(nx[0]) + " C_h=" + csv::format(res.C_h) +
        " bound=" + csv::format(2.0 * T) + (pass ? " PASS" : " FAIL"));
    return pass ? kExitOk : kExitBound;
}

int cmd_poincare(double T, std::vector<double> v, int nt, std::vector<int> nx,
                 const std::string& sweep_path, const std::string& out_path,
                 unsigned seed) {
    if (!sweep_path.empty()) {
        json sweep = load_config(sweep_path);
        std::string out = "v,T,nt,nx,lambda_min,C_h,bound_2T,pass\n";
        int rc = kExitOk;
        for (double sv : sweep.at("v").get<std::vector<double>>())
            for (double sT : sweep.at("T").get<std::vector<double>>())
                for (int n : sweep.at("n").get<std::vector<int>>()) {
                    std::string row;
                    int one = poincare_one(sT, {sv}, n, {n}, seed, &row);
                    out += row;
                    if (one != kExitOk) rc = one;
                }
        if (!out_path.empty()) write_file(out_path, out);
        return rc;
    }
    if (!(T > 0.0)) throw std::runtime_error("T must be positive");
    if (v.empty()) v = {0.0};
    if (nx.empty()) nx = {nt};
    std::string row;
    int rc = poincare_one(T, v, nt, nx, seed, out_path.empty() ? nullptr : &row);
    if (!out_path.empty())
        write_file(out_path, "v,T,nt,nx,lambda_min,C_h,bound_2T,pass\n" + row);
    return rc;
}

int cmd_vlasov_check(const std::string& config_path, const std::string& out_override) {
    json cfg = load_config(config_path);
    double T = cfg.at("T").get<double>();
    int quad_order = cfg.value("quad_order", 6);

    auto get3 = [&](const char* key) {
        std::array<std::string, 3> a{"0", "0", "0"};
        if (cfg.contains(key)) {
            auto v = cfg.at(key).get<std::vector<std::string>>();
            for (std::size_t i = 0; i < v.size() && i < 3; ++i) a[i] = v[i];
        }
        return a;
    };
    auto fields = vlasov::EMFields::parse(get3("E"), get3("B"));

    std::string out = "case,lhs,rhs,ratio,bound,pass\n";
    bool all_pass = true;
    for (const auto& jc : cfg.at("cases")) {
        vlasov::VlasovTestFunction tf;
        tf.f = expr::parse(jc.at("f").get<std::string>());
        for (const auto& [name, box] : jc.at("support").items()) {
            auto b = box.get<std::vector<double>>();
            tf.support.push_back({name, {b.at(0), b.at(1)}});
        }
        auto rep = vlasov::vlasov_ratio(tf, fields, T, quad_order);
        bool pass = rep.pass && rep.inflow_ok;
        all_pass = all_pass && pass;
        std::string name = jc.value("name", std::string("case"));
        out += csv::row({name, csv::format(rep.lhs), csv::format(rep.rhs),
                         csv::format(rep.ratio), csv::format(2.0 * T),
                         pass ? "1" : "0"});
        say(name + ": ratio=" + csv::format(rep.ratio) +
            " bound=" + csv::format(2.0 * T) + (pass ? " PASS" : " FAIL"));
    }
    std::string out_path = !out_override.empty() ? out_override
                                                 : cfg.value("out", std::string(""));
    if (!out_path.empty()) write_file(out_path, out);
    return all_pass ? kExitOk : kExitBound;
}

int cmd_convergence(const std::string& config_path, const std::string& out_override) {
    json cfg = load_config(config_path);
    auto u_exact = expr::parse(cfg.at("u_exact").get<std::string>());
    auto ladder = cfg.at("ladder").get<std::vector<int>>();
    if (ladder.size() < 2) throw std::runtime_error("ladder needs at least two levels");

    std::string out = "n,l2_error\n";
    std::vector<double> errors;
    for (int n : ladder) {
        json level = cfg;
        level["nt"] = n;
        std::vector<int> nx(parse_domain(cfg.at("domain")).dim, n);
        level["nx"] = nx;
        auto tc = parse_case(level);
        auto res = solver::solve_transport(tc);
        auto exact = transport::sample_at_quadrature(u_exact, res.basis,
                                                     tc.grid.dim(), tc.v);
        transport::Vector diff = res.basis.S * res.u - exact;
        double err = transport::l2_norm_samples(diff, res.basis);
        errors.push_back(err);
        out += csv::row({std::to_string(n), csv::format(err)});
        say("n=" + std::to_string(n) + " error=" + csv::format(err));
    }

    bool decreasing = true;
    double min_order = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < errors.size(); ++i) {
        decreasing = decreasing && errors[i] < errors[i - 1];
        double rate = std::log2(errors[i - 1] / errors[i]) /
                      std::log2(static_cast<double>(ladder[i]) / ladder[i - 1]);
        min_order = std::min(min_order, rate);
        say("order " + std::to_string(ladder[i - 1]) + "->" + std::to_string(ladder[i]) +
            ": " + csv::format(rate));
    }

    std::string out_path = !out_override.empty() ? out_override
                                                 : cfg.value("out", std::string(""));
    if (!out_path.empty()) write_file(out_path, out);
    say("observed order: " + csv::format(min_order));
    return decreasing ? kExitOk : kExitBound;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Space-time least-squares transport solver and Poincare verifier"};
    app.require_subcommand(1);

    std::string config_path, out_path, sweep_path;
    app.add_flag("--quiet", g_quiet, "suppress progress output");

    auto* solve = app.add_subcommand("solve", "solve a transport case");
    solve->add_option("--config", config_path, "JSON case configuration")->required();
    solve->add_option("--out", out_path, "solution CSV path");

    auto* lift = app.add_subcommand("lift", "build the characteristic lifting");
    lift->add_option("--config", config_path, "JSON case configuration")->required();
    lift->add_option("--out", out_path, "lifting CSV path");

    double T = 1.0;
    std::vector<double> v;
    int nt = 16;
    std::vector<int> nx;
    unsigned seed = 42;
    auto* poin = app.add_subcommand("poincare", "discrete Poincare constant");
    poin->add_option("--T", T, "final time");
    poin->add_option("--v", v, "velocity components");
    poin->add_option("--nt", nt, "time cells");
    poin->add_option("--nx", nx, "space cells per axis");
    poin->add_option("--sweep", sweep_path, "JSON sweep file with lists v, T, n");
    poin->add_option("--out", out_path, "report CSV path");
    poin->add_option("--seed", seed, "seed for the eigen start vector");

    auto* vla = app.add_subcommand("vlasov-check", "Vlasov inequality checks");
    vla->add_option("--config", config_path, "JSON catalog configuration")->required();
    vla->add_option("--out", out_path, "report CSV path");

    auto* conv = app.add_subcommand("convergence", "manufactured refinement study");
    conv->add_option("--config", config_path, "JSON case with ladder and u_exact")->required();
    conv->add_option("--out", out_path, "report CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (solve->parsed()) return cmd_solve(config_path, out_path);
        if (lift->parsed()) return cmd_lift(config_path, out_path);
        if (poin->parsed()) return cmd_poincare(T, v, nt, nx, sweep_path, out_path, seed);
        if (vla->parsed()) return cmd_vlasov_check(config_path, out_path);
        if (conv->parsed()) return cmd_convergence(config_path, out_path);
    } catch (const NoConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
