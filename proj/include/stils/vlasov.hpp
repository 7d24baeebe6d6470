#pragma once

#include <array>
#include <vector>

#include "stils/expr.hpp"

namespace stils::vlasov {

using Vec3 = std::array<double, 3>;

/// Electric and magnetic fields, component expressions in (t, x, y).
struct EMFields {
    std::array<expr::Expression, 3> E;
    std::array<expr::Expression, 3> B;

    static EMFields parse(const std::array<std::string, 3>& e,
                          const std::array<std::string, 3>& b);

    Vec3 eval_E(double t, const Vec3& x) const;
    Vec3 eval_B(double t, const Vec3& x) const;
};

struct PhaseState {
    double t = 0.0;
    Vec3 x{0, 0, 0};
    Vec3 v{0, 0, 0};
};

Vec3 cross(const Vec3& a, const Vec3& b);

/// Phase-space advection field a = (1, v, E + v x B).
std::array<double, 7> field_a(const PhaseState& state, const EMFields& fields);

/// Central finite-difference estimate of the phase-space divergence of a.
/// Analytically zero for any C^1 fields.
double divergence_a(const PhaseState& state, const EMFields& fields, double h = 1e-5);

/// Classical RK4 on the Lorentz characteristics xdot = v, vdot = E + v x B.
std::vector<PhaseState> flow_rk4(const PhaseState& state0, const EMFields& fields,
                                 double dt, int nsteps);

/// Test function with declared compact support in x and v; free variables
/// must be drawn from t plus the declared coordinates.
struct VlasovTestFunction {
    expr::Expression f;
    // per declared x axis ("x","y") and v axis ("vx","vy","vz"): [lo, hi]
    std::vector<std::pair<std::string, std::array<double, 2>>> support;
};

struct RatioReport {
    double lhs = 0.0;    // ||f||
    double rhs = 0.0;    // ||a . grad_{t,x,v} f||
    double ratio = 0.0;
    bool pass = false;
    bool inflow_ok = true;
    double inflow_max = 0.0;
};

/// Certifies ||f|| <= 2T ||df/dt + v.grad_x f + (E + v x B).grad_v f|| by
/// tensor Gauss quadrature over (0,T) x support; partial derivatives of f
/// by central differences.
RatioReport vlasov_ratio(const VlasovTestFunction& testfn, const EMFields& fields,
                         double T, int quad_order = 6);

}  // namespace stils::vlasov
