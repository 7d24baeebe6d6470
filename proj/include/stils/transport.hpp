#pragma once

#include <Eigen/Sparse>
#include <Eigen/Dense>
#include <vector>

#include "stils/expr.hpp"
#include "stils/geometry.hpp"

namespace stils::transport {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Gauss-Legendre rule on the reference interval [0,1].
/// `order` is the number of points per axis; exact for degree <= 2*order-1.
struct QuadratureRule {
    int order = 2;
    std::vector<double> points;   // in (0,1)
    std::vector<double> weights;  // sum to 1
};

QuadratureRule gauss_legendre(int order);

/// Nodal basis values at global quadrature points plus global weights.
struct BasisEval {
    SparseMatrix S;  // nquad x ndof, value of each Q1 basis function
    Vector W;        // nquad, positive, sums to T*|Omega|
    /// Space-time coordinates of each quadrature point: {t, x[, y]}.
    std::vector<std::array<double, 3>> coords;
};

/// Samples of (d/dt + v.grad_x) of each basis function at quadrature points.
struct AdvectionSamples {
    SparseMatrix D;  // nquad x ndof, same pattern as BasisEval::S
    std::vector<double> velocity;
};

BasisEval assemble_basis(const geometry::SpaceTimeGrid& grid,
                         const QuadratureRule& rule);

AdvectionSamples assemble_advection(const geometry::SpaceTimeGrid& grid,
                                    const std::vector<double>& v,
                                    const QuadratureRule& rule);

/// Nodal interpolant of an analytic field. Velocity components are bound
/// as vx, vy from v_binding; spatial variables are x (and y in 2D).
Vector interpolate(const expr::Expression& field, const geometry::SpaceTimeGrid& grid,
                   const std::vector<double>& v_binding = {});

/// Field samples at every quadrature point (for right-hand sides).
Vector sample_at_quadrature(const expr::Expression& field, const BasisEval& basis,
                            int dim, const std::vector<double>& v_binding = {});

/// sqrt(sum_q W_q * value_q^2) for samples already at quadrature points.
double l2_norm_samples(const Vector& samples, const BasisEval& basis);

/// L2 norm of the interpolant with coefficient vector c.
double l2_norm(const Vector& coefficients, const BasisEval& basis);

}  // namespace stils::transport
