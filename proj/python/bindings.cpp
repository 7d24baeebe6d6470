#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/eigen.h>

#include "stils/expr.hpp"
#include "stils/geometry.hpp"
#include "stils/lifting.hpp"
#include "stils/poincare.hpp"
#include "stils/solver.hpp"
#include "stils/transport.hpp"
#include "stils/vlasov.hpp"

namespace py = pybind11;
using namespace stils;

namespace {

geometry::SpaceDomain make_domain(const std::vector<double>& lower,
                                  const std::vector<double>& upper) {
    geometry::SpaceDomain d;
    d.dim = static_cast<int>(lower.size());
    for (std::size_t i = 0; i < lower.size() && i < 2; ++i) {
        d.lower[i] = lower[i];
        d.upper[i] = upper[i];
    }
    d.validate();
    return d;
}

vlasov::EMFields make_fields(const std::vector<std::string>& E,
                             const std::vector<std::string>& B) {
    std::array<std::string, 3> e{"0", "0", "0"}, b{"0", "0", "0"};
    for (std::size_t i = 0; i < E.size() && i < 3; ++i) e[i] = E[i];
    for (std::size_t i = 0; i < B.size() && i < 3; ++i) b[i] = B[i];
    return vlasov::EMFields::parse(e, b);
}

}  // namespace

PYBIND11_MODULE(_stils, m) {
    m.doc() = "Space-time least-squares transport solver and Poincare verifier";

    py::register_exception<ParseError>(m, "ExprParseError");
    py::register_exception<EvalError>(m, "ExprEvalError");
    py::register_exception<NoConvergenceError>(m, "NoConvergence");

    m.def("eval_expr",
          [](const std::string& text, const std::map<std::string, double>& ctx) {
              expr::EvalContext c(ctx.begin(), ctx.end());
              return expr::parse(text).eval(c);
          },
          py::arg("text"), py::arg("context") = std::map<std::string, double>{});

    m.def("free_vars", [](const std::string& text) {
        auto vars = expr::parse(text).free_vars();
        return std::vector<std::string>(vars.begin(), vars.end());
    });

    m.def("backtrack",
          [](double t, const std::vector<double>& x, const std::vector<double>& v,
             const std::vector<double>& lower, const std::vector<double>& upper) {
              std::array<double, 2> xp{0, 0};
              for (std::size_t i = 0; i < x.size() && i < 2; ++i) xp[i] = x[i];
              auto hit = lifting::backtrack(t, xp, v, make_domain(lower, upper));
              py::dict out;
              out["kind"] = hit.kind == lifting::CharacteristicHit::Initial
                                ? "initial"
                                : "boundary";
              out["time"] = hit.hit_time;
              out["point"] = std::vector<double>(hit.hit_point.begin(),
                                                 hit.hit_point.begin() + x.size());
              return out;
          });

    m.def("lift",
          [](const std::string& u0, const std::string& ub, const std::vector<double>& v,
             double T, const std::vector<double>& lower, const std::vector<double>& upper,
             int nt, const std::vector<int>& nx) {
              auto grid = geometry::build_grid(T, make_domain(lower, upper), nt, nx);
              auto g = lifting::lift(expr::parse(u0), expr::parse(ub), v, grid);
              return g.coefficients;
          },
          py::arg("u0"), py::arg("ub"), py::arg("v"), py::arg("T"), py::arg("lower"),
          py::arg("upper"), py::arg("nt"), py::arg("nx"));

    m.def("solve_transport",
          [](const std::string& G, const std::vector<double>& v, double T,
             const std::vector<double>& lower, const std::vector<double>& upper, int nt,
             const std::vector<int>& nx, const std::string& u0, const std::string& ub,
             double tolerance) {
              solver::TransportCase tc;
              tc.grid = geometry::build_grid(T, make_domain(lower, upper), nt, nx);
              tc.v = v;
              tc.G = expr::parse(G);
              tc.u0 = expr::parse(u0);
              tc.ub = expr::parse(ub);
              tc.cfg.tolerance = tolerance;
              auto res = solver::solve_transport(tc);
              auto stab = solver::stability_check(res.f, res.l2_G, T);
              py::dict out;
              out["u"] = res.u;
              out["f"] = res.f.f;
              out["g"] = res.g.coefficients;
              out["l2_f"] = res.f.l2_f;
              out["l2_G"] = res.l2_G;
              out["l2_misfit"] = res.f.l2_misfit;
              out["iterations"] = res.f.iterations;
              out["ratio"] = stab.ratio;
              out["stability_pass"] = stab.pass;
              return out;
          },
          py::arg("G"), py::arg("v"), py::arg("T"), py::arg("lower"), py::arg("upper"),
          py::arg("nt"), py::arg("nx"), py::arg("u0") = "0", py::arg("ub") = "0",
          py::arg("tolerance") = 1e-10);

    m.def("discrete_constant",
          [](double T, const std::vector<double>& v, const std::vector<double>& lower,
             const std::vector<double>& upper, int nt, const std::vector<int>& nx,
             unsigned seed) {
              auto grid = geometry::build_grid(T, make_domain(lower, upper), nt, nx);
              poincare::EigenConfig cfg;
              cfg.seed = seed;
              auto res = poincare::discrete_constant(grid, v, cfg);
              py::dict out;
              out["lambda_min"] = res.lambda_min;
              out["C_h"] = res.C_h;
              out["iterations"] = res.iterations;
              out["eigen_residual"] = res.eigen_residual;
              out["bound"] = 2.0 * T;
              return out;
          },
          py::arg("T"), py::arg("v"), py::arg("lower"), py::arg("upper"), py::arg("nt"),
          py::arg("nx"), py::arg("seed") = 42);

    m.def("divergence_a",
          [](double t, const std::vector<double>& x, const std::vector<double>& v,
             const std::vector<std::string>& E, const std::vector<std::string>& B) {
              vlasov::PhaseState s;
              s.t = t;
              for (std::size_t i = 0; i < 3; ++i) {
                  s.x[i] = i < x.size() ? x[i] : 0.0;
                  s.v[i] = i < v.size() ? v[i] : 0.0;
              }
              return vlasov::divergence_a(s, make_fields(E, B));
          });

    m.def("vlasov_ratio",
          [](const std::string& f,
             const std::map<std::string, std::vector<double>>& support,
             const std::vector<std::string>& E, const std::vector<std::string>& B,
             double T, int quad_order) {
              vlasov::VlasovTestFunction tf;
              tf.f = expr::parse(f);
              for (const auto& [name, box] : support)
                  tf.support.push_back({name, {box.at(0), box.at(1)}});
              auto rep = vlasov::vlasov_ratio(tf, make_fields(E, B), T, quad_order);
              py::dict out;
              out["lhs"] = rep.lhs;
              out["rhs"] = rep.rhs;
              out["ratio"] = rep.ratio;
              out["bound"] = 2.0 * T;
              out["pass"] = rep.pass;
              return out;
          },
          py::arg("f"), py::arg("support"), py::arg("E"), py::arg("B"), py::arg("T"),
          py::arg("quad_order") = 6);
}
