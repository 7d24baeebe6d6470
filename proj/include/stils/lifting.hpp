#pragma once

#include <array>
#include <vector>

#include "stils/expr.hpp"
#include "stils/geometry.hpp"
#include "stils/transport.hpp"

namespace stils::lifting {

/// Where the backward characteristic through (t,x) first leaves the domain.
struct CharacteristicHit {
    enum Kind { Initial, Boundary } kind = Initial;
    double hit_time = 0.0;
    std::array<double, 2> hit_point{0.0, 0.0};
};

/// Follow X(s) = x - v*(t-s) backward from s=t. Closed form per axis:
/// the exit is the latest s at which some axis reaches its bound; if no
/// axis exits before s=0 the characteristic reaches the initial slice.
CharacteristicHit backtrack(double t, const std::array<double, 2>& x,
                            const std::vector<double>& v,
                            const geometry::SpaceDomain& domain);

struct LiftedField {
    transport::Vector coefficients;
    double data_sup = 0.0;  // max nodal |u0| + max inflow-boundary |ub|
};

/// Transport the data along characteristics: node value is u0 at an initial
/// hit, ub (evaluated at the hit time and point) at a boundary hit.
LiftedField lift(const expr::Expression& u0, const expr::Expression& ub,
                 const std::vector<double>& v, const geometry::SpaceTimeGrid& grid);

struct LinfReport {
    double max_abs_g = 0.0;
    double bound = 0.0;
    bool pass = false;
};

LinfReport linf_bound_check(const LiftedField& g, const expr::Expression& u0,
                            const expr::Expression& ub,
                            const std::vector<double>& v,
                            const geometry::SpaceTimeGrid& grid);

}  // namespace stils::lifting
