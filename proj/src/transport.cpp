#include "stils/transport.hpp"

#include <cmath>
#include <stdexcept>

namespace stils::transport {

QuadratureRule gauss_legendre(int order) {
    if (order < 1) throw std::invalid_argument("quadrature order must be at least 1");
    QuadratureRule rule;
    rule.order = order;
    rule.points.resize(order);
    rule.weights.resize(order);
    // Newton iteration on Legendre roots in (-1,1), then map to (0,1).
    for (int i = 0; i < order; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.points[order - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[order - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

namespace {

struct CellIterator {
    const geometry::SpaceTimeGrid& grid;
    const QuadratureRule& rule;
    int dim;        // spatial dim
    int naxes;      // 1 + dim
    int qpc;        // quadrature points per cell

    CellIterator(const geometry::SpaceTimeGrid& g, const QuadratureRule& r)
        : grid(g), rule(r), dim(g.dim()), naxes(1 + g.dim()) {
        qpc = 1;
        for (int a = 0; a < naxes; ++a) qpc *= rule.order;
    }

    double h(int axis) const { return axis == 0 ? grid.ht() : grid.hx(axis - 1); }

    double origin(int axis, int cell_i) const {
        return axis == 0 ? cell_i * grid.ht()
                         : grid.domain.lower[axis - 1] + cell_i * grid.hx(axis - 1);
    }
};

}  // namespace

BasisEval assemble_basis(const geometry::SpaceTimeGrid& grid,
                         const QuadratureRule& rule) {
    CellIterator it(grid, rule);
    const int ncells = grid.num_cells();
    const int nquad = ncells * it.qpc;
    const int ncorners = 1 << it.naxes;

    BasisEval out;
    out.W.resize(nquad);
    out.coords.resize(nquad);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(nquad) * ncorners);

    auto npa = grid.nodes_per_axis();
    (void)npa;
    int cells[3] = {grid.nt, grid.nx[0], it.dim == 2 ? grid.nx[1] : 1};

    int cell = 0;
    for (int ct = 0; ct < cells[0]; ++ct)
        for (int c0 = 0; c0 < cells[1]; ++c0)
            for (int c1 = 0; c1 < cells[2]; ++c1, ++cell) {
                int ci[3] = {ct, c0, c1};
                // local tensor loop over quadrature points
                for (int lq = 0; lq < it.qpc; ++lq) {
                    int rem = lq;
                    double xi[3] = {0, 0, 0};
                    double wq = 1.0;
                    for (int a = it.naxes - 1; a >= 0; --a) {
                        int k = rem % rule.order;
                        rem /= rule.order;
                        xi[a] = rule.points[k];
                        wq *= rule.weights[k] * it.h(a);
                    }
                    int q = cell * it.qpc + lq;
                    out.W[q] = wq;
                    for (int a = 0; a < it.naxes; ++a)
                        out.coords[q][a] = it.origin(a, ci[a]) + xi[a] * it.h(a);
                    for (int corner = 0; corner < ncorners; ++corner) {
                        double phi = 1.0;
                        int idx[3] = {ct, c0, c1};
                        for (int a = 0; a < it.naxes; ++a) {
                            int bit = (corner >> a) & 1;
                            phi *= bit ? xi[a] : 1.0 - xi[a];
                            idx[a] = ci[a] + bit;
                        }
                        trips.emplace_back(q, grid.node_index(idx[0], idx[1], idx[2]), phi);
                    }
                }
            }

    out.S.resize(nquad, grid.num_nodes());
    out.S.setFromTriplets(trips.begin(), trips.end());
    return out;
}

AdvectionSamples assemble_advection(const geometry::SpaceTimeGrid& grid,
                                    const std::vector<double>& v,
                                    const QuadratureRule& rule) {
    if (static_cast<int>(v.size()) != grid.dim())
        throw std::invalid_argument("velocity dimension must match grid");

    CellIterator it(grid, rule);
    const int ncells = grid.num_cells();
    const int nquad = ncells * it.qpc;
    const int ncorners = 1 << it.naxes;

    // advection coefficient per axis: a = (1, v)
    double adv[3] = {1.0, v[0], it.dim == 2 ? v[1] : 0.0};

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(nquad) * ncorners);

    int cells[3] = {grid.nt, grid.nx[0], it.dim == 2 ? grid.nx[1] : 1};
    int cell = 0;
    for (int ct = 0; ct < cells[0]; ++ct)
        for (int c0 = 0; c0 < cells[1]; ++c0)
            for (int c1 = 0; c1 < cells[2]; ++c1, ++cell) {
                int ci[3] = {ct, c0, c1};
                for (int lq = 0; lq < it.qpc; ++lq) {
                    int rem = lq;
                    double xi[3] = {0, 0, 0};
                    for (int a = it.naxes - 1; a >= 0; --a) {
                        xi[a] = rule.points[rem % rule.order];
                        rem /= rule.order;
                    }
                    int q = cell * it.qpc + lq;
                    for (int corner = 0; corner < ncorners; ++corner) {
                        int idx[3] = {ct, c0, c1};
                        double dphi = 0.0;
                        // sum over differentiated axis
                        for (int da = 0; da < it.naxes; ++da) {
                            double term = adv[da];
                            for (int a = 0; a < it.naxes; ++a) {
                                int bit = (corner >> a) & 1;
                                if (a == da)
                                    term *= (bit ? 1.0 : -1.0) / it.h(a);
                                else
                                    term *= bit ? xi[a] : 1.0 - xi[a];
                            }
                            dphi += term;
                        }
                        for (int a = 0; a < it.naxes; ++a)
                            idx[a] = ci[a] + ((corner >> a) & 1);
                        trips.emplace_back(q, grid.node_index(idx[0], idx[1], idx[2]), dphi);
                    }
                }
            }

    AdvectionSamples out;
    out.velocity = v;
    out.D.resize(nquad, grid.num_nodes());
    out.D.setFromTriplets(trips.begin(), trips.end());
    return out;
}

namespace {

expr::EvalContext make_context(const std::array<double, 3>& coords, int dim,
                               const std::vector<double>& v_binding) {
    expr::EvalContext ctx;
    ctx["t"] = coords[0];
    ctx["x"] = coords[1];
    if (dim == 2) ctx["y"] = coords[2];
    static const char* vnames[3] = {"vx", "vy", "vz"};
    for (std::size_t i = 0; i < v_binding.size() && i < 3; ++i)
        ctx[vnames[i]] = v_binding[i];
    return ctx;
}

}  // namespace

Vector interpolate(const expr::Expression& field, const geometry::SpaceTimeGrid& grid,
                   const std::vector<double>& v_binding) {
    auto npa = grid.nodes_per_axis();
    Vector c(grid.num_nodes());
    for (int it = 0; it < npa[0]; ++it)
        for (int i0 = 0; i0 < npa[1]; ++i0)
            for (int i1 = 0; i1 < npa[2]; ++i1) {
                auto ctx = make_context(grid.node_coords(it, i0, i1), grid.dim(), v_binding);
                c[grid.node_index(it, i0, i1)] = field.eval(ctx);
            }
    return c;
}

Vector sample_at_quadrature(const expr::Expression& field, const BasisEval& basis,
                            int dim, const std::vector<double>& v_binding) {
    Vector s(basis.W.size());
    for (Eigen::Index q = 0; q < basis.W.size(); ++q) {
        auto ctx = make_context(basis.coords[q], dim, v_binding);
        s[q] = field.eval(ctx);
    }
    return s;
}

double l2_norm_samples(const Vector& samples, const BasisEval& basis) {
    if (samples.size() != basis.W.size())
        throw std::invalid_argument("sample vector does not match quadrature size");
    return std::sqrt(samples.cwiseAbs2().dot(basis.W));
}

double l2_norm(const Vector& coefficients, const BasisEval& basis) {
    if (coefficients.size() != basis.S.cols())
        throw std::invalid_argument("coefficient vector does not match basis");
    Vector samples = basis.S * coefficients;
    return std::sqrt(samples.cwiseAbs2().dot(basis.W));
}

}  // namespace stils::transport
