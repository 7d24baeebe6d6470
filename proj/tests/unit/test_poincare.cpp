#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "stils/poincare.hpp"

using namespace stils;
using transport::Vector;

namespace {

geometry::SpaceTimeGrid grid_1d(double T, int n) {
    geometry::SpaceDomain d;
    d.dim = 1;
    d.lower[0] = 0.0;
    d.upper[0] = 1.0;
    return geometry::build_grid(T, d, n, {n});
}

/// Dense generalized eigensolve of the reduced (K, M) pair, independent of
/// the inverse power iteration path.
double dense_lambda_min(const geometry::SpaceTimeGrid& grid, double v) {
    auto rule = transport::gauss_legendre(2);
    auto basis = transport::assemble_basis(grid, rule);
    auto adv = transport::assemble_advection(grid, {v}, rule);
    auto cs = geometry::constrained_dofs(grid, geometry::classify_faces(grid, {v}));

    std::vector<int> keep;
    for (int i = 0; i < grid.num_nodes(); ++i)
        if (!cs.contains(i)) keep.push_back(i);
    const int m = static_cast<int>(keep.size());

    Eigen::MatrixXd D = Eigen::MatrixXd(adv.D);
    Eigen::MatrixXd S = Eigen::MatrixXd(basis.S);
    Eigen::MatrixXd Dr(D.rows(), m), Sr(S.rows(), m);
    for (int r = 0; r < m; ++r) {
        Dr.col(r) = D.col(keep[r]);
        Sr.col(r) = S.col(keep[r]);
    }
    Eigen::MatrixXd K = Dr.transpose() * basis.W.asDiagonal() * Dr;
    Eigen::MatrixXd M = Sr.transpose() * basis.W.asDiagonal() * Sr;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("inverse power iteration matches a dense eigensolve") {
    auto grid = grid_1d(1.0, 8);
    for (double v : {0.0, 1.0}) {
        auto res = poincare::discrete_constant(grid, {v});
        double lambda_dense = dense_lambda_min(grid, v);
        CHECK(res.lambda_min == doctest::Approx(lambda_dense).epsilon(1e-7));
        CHECK(res.C_h == doctest::Approx(1.0 / std::sqrt(lambda_dense)).epsilon(1e-7));
        CHECK(res.eigen_residual <= 1e-8);
    }
}

TEST_CASE("v=0 constant approaches 2T/pi") {
    // continuous eigenproblem in time only: lambda_min = (pi/2T)^2
    auto res = poincare::discrete_constant(grid_1d(1.0, 64), {0.0});
    CHECK(res.C_h == doctest::Approx(2.0 / M_PI).epsilon(0.01));
    CHECK(res.C_h <= 2.0 * (1.0 + 1e-10));

    auto res2 = poincare::discrete_constant(grid_1d(2.0, 64), {0.0});
    CHECK(res2.C_h == doctest::Approx(4.0 / M_PI).epsilon(0.01));
}

TEST_CASE("bound 2T holds across velocities") {
    for (double v : {0.0, 0.5, 1.0, 4.0}) {
        auto res = poincare::discrete_constant(grid_1d(1.0, 16), {v});
        CHECK(res.C_h <= 2.0 * (1.0 + 1e-10));
        CHECK(res.lambda_min > 0.0);
    }
}

TEST_CASE("refinement enlarges the space and raises C_h toward the bound") {
    double prev = 0.0;
    for (int n : {4, 8, 16}) {
        auto res = poincare::discrete_constant(grid_1d(1.0, n), {0.5});
        CHECK(res.C_h >= prev - 1e-12);
        CHECK(res.C_h <= 2.0 * (1.0 + 1e-10));
        prev = res.C_h;
    }
}

TEST_CASE("proof identity: zero function") {
    geometry::SpaceDomain dom;
    dom.dim = 1;
    dom.lower[0] = 0.0;
    dom.upper[0] = 1.0;
    auto rep = poincare::proof_identity_check(expr::parse("0"), {1.0}, 1.0, dom);
    CHECK(rep.interior == 0.0);
    CHECK(rep.boundary == 0.0);
    CHECK(rep.sign_pass);
    CHECK(rep.inflow_ok);
}

TEST_CASE("proof identity: bubble test function") {
    geometry::SpaceDomain dom;
    dom.dim = 1;
    dom.lower[0] = 0.0;
    dom.upper[0] = 1.0;
    auto rep = poincare::proof_identity_check(expr::parse("t*x*(1-x)"), {1.0}, 1.0, dom,
                                              4, 6);
    CHECK(rep.inflow_ok);
    CHECK(rep.interior < 0.0);
    CHECK(rep.residual <= 1e-8);
}

TEST_CASE("proof identity: quadrature convergence of the residual") {
    geometry::SpaceDomain dom;
    dom.dim = 1;
    dom.lower[0] = 0.0;
    dom.upper[0] = 1.0;
    auto f = expr::parse("sin(pi*t/2)*x*(1-x)*exp(x)");
    double prev = 1e9;
    for (int order : {2, 4, 6}) {
        auto rep = poincare::proof_identity_check(f, {0.5}, 1.0, dom, 2, order);
        CHECK(rep.residual <= prev + 1e-9);  // tolerance absorbs the FD floor
        prev = rep.residual;
    }
    CHECK(prev <= 1e-8);
}

TEST_CASE("proof identity flags nonvanishing inflow data") {
    geometry::SpaceDomain dom;
    dom.dim = 1;
    dom.lower[0] = 0.0;
    dom.upper[0] = 1.0;
    auto rep = poincare::proof_identity_check(expr::parse("1"), {1.0}, 1.0, dom);
    CHECK(!rep.inflow_ok);
    CHECK(rep.inflow_max == doctest::Approx(1.0));
}

TEST_CASE("2D constant also stays below the bound") {
    geometry::SpaceDomain d;
    d.dim = 2;
    d.lower = {0.0, 0.0};
    d.upper = {1.0, 1.0};
    auto grid = geometry::build_grid(1.0, d, 6, {6, 6});
    auto res = poincare::discrete_constant(grid, {1.0, -0.5});
    CHECK(res.C_h <= 2.0 * (1.0 + 1e-10));
    CHECK(res.lambda_min > 0.0);
}
