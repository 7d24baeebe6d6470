#include "stils/lifting.hpp"

#include <cmath>
#include <stdexcept>

namespace stils::lifting {

namespace {

constexpr double kGeomTol = 1e-12;

expr::EvalContext spatial_context(const std::array<double, 2>& p, int dim,
                                  const std::vector<double>& v) {
    expr::EvalContext ctx;
    ctx["x"] = p[0];
    if (dim == 2) ctx["y"] = p[1];
    static const char* vnames[2] = {"vx", "vy"};
    for (std::size_t i = 0; i < v.size() && i < 2; ++i) ctx[vnames[i]] = v[i];
    return ctx;
}

}  // namespace

CharacteristicHit backtrack(double t, const std::array<double, 2>& x,
                            const std::vector<double>& v,
                            const geometry::SpaceDomain& domain) {
    domain.validate();
    if (t < -kGeomTol) throw std::invalid_argument("time must be nonnegative");
    for (int i = 0; i < domain.dim; ++i) {
        double span = domain.upper[i] - domain.lower[i];
        if (x[i] < domain.lower[i] - kGeomTol * span ||
            x[i] > domain.upper[i] + kGeomTol * span)
            throw std::invalid_argument("point lies outside the closed domain");
    }

    // Per axis: latest s < t at which X_i(s) = x_i - v_i*(t-s) leaves [l_i,u_i].
    double s_exit = -1.0;
    int exit_axis = -1;
    for (int i = 0; i < domain.dim; ++i) {
        double vi = v[i];
        if (vi == 0.0) continue;
        double s;
        if (vi > 0.0)
            s = t - (x[i] - domain.lower[i]) / vi;  // moving backward hits the lower bound
        else
            s = t - (x[i] - domain.upper[i]) / vi;
        if (s > s_exit) {
            s_exit = s;
            exit_axis = i;
        }
    }

    CharacteristicHit hit;
    if (exit_axis < 0 || s_exit <= kGeomTol) {
        hit.kind = CharacteristicHit::Initial;
        hit.hit_time = 0.0;
        for (int i = 0; i < domain.dim; ++i) hit.hit_point[i] = x[i] - v[i] * t;
    } else {
        hit.kind = CharacteristicHit::Boundary;
        hit.hit_time = s_exit;
        for (int i = 0; i < domain.dim; ++i) hit.hit_point[i] = x[i] - v[i] * (t - s_exit);
        // snap the exiting axis onto its bound exactly
        hit.hit_point[exit_axis] =
            v[exit_axis] > 0.0 ? domain.lower[exit_axis] : domain.upper[exit_axis];
    }
    return hit;
}

LiftedField lift(const expr::Expression& u0, const expr::Expression& ub,
                 const std::vector<double>& v, const geometry::SpaceTimeGrid& grid) {
    if (static_cast<int>(v.size()) != grid.dim())
        throw std::invalid_argument("velocity dimension must match grid");

    auto npa = grid.nodes_per_axis();
    LiftedField out;
    out.coefficients.resize(grid.num_nodes());

    for (int it = 0; it < npa[0]; ++it)
        for (int i0 = 0; i0 < npa[1]; ++i0)
            for (int i1 = 0; i1 < npa[2]; ++i1) {
                auto c = grid.node_coords(it, i0, i1);
                std::array<double, 2> x{c[1], c[2]};
                auto hit = backtrack(c[0], x, v, grid.domain);
                double value;
                if (hit.kind == CharacteristicHit::Initial) {
                    value = u0.eval(spatial_context(hit.hit_point, grid.dim(), v));
                } else {
                    auto ctx = spatial_context(hit.hit_point, grid.dim(), v);
                    ctx["t"] = hit.hit_time;
                    value = ub.eval(ctx);
                }
                out.coefficients[grid.node_index(it, i0, i1)] = value;
            }
    return out;
}

LinfReport linf_bound_check(const LiftedField& g, const expr::Expression& u0,
                            const expr::Expression& ub,
                            const std::vector<double>& v,
                            const geometry::SpaceTimeGrid& grid) {
    auto npa = grid.nodes_per_axis();
    LinfReport rep;
    rep.max_abs_g = g.coefficients.cwiseAbs().maxCoeff();

    double sup_u0 = 0.0;
    for (int i0 = 0; i0 < npa[1]; ++i0)
        for (int i1 = 0; i1 < npa[2]; ++i1) {
            auto c = grid.node_coords(0, i0, i1);
            std::array<double, 2> x{c[1], c[2]};
            sup_u0 = std::max(sup_u0, std::fabs(u0.eval(spatial_context(x, grid.dim(), v))));
        }

    // sample ub at nodes of every inflow spatial face, t > 0
    double sup_ub = 0.0;
    auto faces = geometry::classify_faces(grid, v);
    for (const auto& f : faces.faces) {
        if (f.axis == 0 || f.cls != geometry::FaceClass::Inflow) continue;
        int ax = f.axis - 1;
        for (int it = 1; it < npa[0]; ++it)
            for (int i0 = 0; i0 < npa[1]; ++i0)
                for (int i1 = 0; i1 < npa[2]; ++i1) {
                    int idx[2] = {i0, i1};
                    int fixed = f.side == 0 ? 0 : grid.nx[ax];
                    if (idx[ax] != fixed) continue;
                    auto c = grid.node_coords(it, i0, i1);
                    std::array<double, 2> x{c[1], c[2]};
                    auto ctx = spatial_context(x, grid.dim(), v);
                    ctx["t"] = c[0];
                    sup_ub = std::max(sup_ub, std::fabs(ub.eval(ctx)));
                }
    }

    rep.bound = sup_u0 + sup_ub;
    rep.pass = rep.max_abs_g <= rep.bound + 1e-12;
    return rep;
}

}  // namespace stils::lifting
