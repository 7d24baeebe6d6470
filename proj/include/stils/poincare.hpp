#pragma once

#include "stils/expr.hpp"
#include "stils/geometry.hpp"
#include "stils/solver.hpp"
#include "stils/transport.hpp"

namespace stils::poincare {

struct EigenConfig {
    double tolerance = 1e-8;  // eigen-residual ||K f - lambda M f|| / ||M f||
    int max_iterations = 200;
    unsigned seed = 42;
    double cg_tolerance = 1e-10;
};

struct RayleighResult {
    double lambda_min = 0.0;
    double C_h = 0.0;  // 1/sqrt(lambda_min)
    int iterations = 0;
    double eigen_residual = 0.0;
    transport::Vector eigenvector;  // reduced coordinates
};

/// Smallest generalized eigenvalue of K f = lambda M f on the constrained
/// space (K = D^T W D, M = S^T W S) by inverse power iteration with inner
/// conjugate-gradient solves. C_h = 1/sqrt(lambda_min) is the discrete
/// Poincare constant; for a conforming subspace C_h <= 2T.
RayleighResult discrete_constant(const geometry::SpaceTimeGrid& grid,
                                 const std::vector<double>& v,
                                 const EigenConfig& cfg = {},
                                 int quad_order = 2);

struct WeightCheckReport {
    double interior = 0.0;   // I = integral over R of (d/dt + v.grad)(w f^2)
    double boundary = 0.0;   // outflow boundary integral of w f^2 (a.n)
    double residual = 0.0;   // |interior - boundary|
    bool sign_pass = false;  // interior <= quadrature tolerance
    bool inflow_ok = true;   // f sampled as vanishing on the inflow boundary
    double inflow_max = 0.0;
};

/// Replicates the weight-function identity behind the Poincare proof with
/// w(t,x) = t - T: compares the interior integral against the outflow
/// boundary integral via the divergence theorem. Derivatives of f are
/// taken by central differences along the advection direction.
WeightCheckReport proof_identity_check(const expr::Expression& f,
                                       const std::vector<double>& v, double T,
                                       const geometry::SpaceDomain& domain,
                                       int cells_per_axis = 4, int quad_order = 6);

}  // namespace stils::poincare
