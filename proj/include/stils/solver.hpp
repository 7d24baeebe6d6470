#pragma once

#include <optional>

#include "stils/expr.hpp"
#include "stils/geometry.hpp"
#include "stils/lifting.hpp"
#include "stils/transport.hpp"

namespace stils::solver {

using transport::SparseMatrix;
using transport::Vector;

/// Reduced normal system K f = b with K = D^T W D on the unconstrained dofs.
struct NormalSystem {
    Eigen::SparseMatrix<double> K;  // m x m, SPD on the reduced space
    Vector b;                       // m
    std::vector<int> reduced_to_full;  // size m
    std::vector<int> full_to_reduced;  // size ndof, -1 at constrained dofs
};

struct SolverConfig {
    double tolerance = 1e-10;     // relative residual
    int max_iterations = 0;       // 0 means 10 * ndof
    bool jacobi_preconditioner = true;
};

struct Solution {
    Vector f;             // full-length, zeros at constrained dofs
    int iterations = 0;
    double residual = 0.0;  // final relative residual
    double l2_f = 0.0;      // ||f||
    double l2_misfit = 0.0; // ||a.grad f - G||
};

NormalSystem assemble_system(const transport::AdvectionSamples& adv,
                             const transport::BasisEval& basis,
                             const Vector& g_samples,
                             const geometry::ConstraintSet& constraints);

/// Preconditioned conjugate gradients on the reduced system; the returned
/// coefficient vector is expanded back to full length.
Solution cg_solve(const NormalSystem& system, const SolverConfig& cfg = {});

struct TransportCase {
    expr::Expression G;
    expr::Expression u0;
    expr::Expression ub;
    std::vector<double> v;
    geometry::SpaceTimeGrid grid;
    SolverConfig cfg;
    int quad_order = 2;
};

struct TransportResult {
    Vector u;  // f + g
    Solution f;
    lifting::LiftedField g;
    double l2_G = 0.0;
    transport::BasisEval basis;
};

/// Lift the data, solve the homogeneous least-squares problem, recombine.
TransportResult solve_transport(const TransportCase& tc);

struct StabilityReport {
    double ratio = 0.0;
    bool pass = false;
};

/// Checks ||f|| <= 2T ||G|| (velocity-independent constant).
StabilityReport stability_check(const Solution& f, double G_norm, double T);

}  // namespace stils::solver
