#include <doctest.h>

#include <cmath>

#include "stils/transport.hpp"

using namespace stils;
using transport::Vector;

namespace {

geometry::SpaceTimeGrid grid_1d(double T = 1.0, int n = 2) {
    geometry::SpaceDomain d;
    d.dim = 1;
    d.lower[0] = 0.0;
    d.upper[0] = 1.0;
    return geometry::build_grid(T, d, n, {n});
}

geometry::SpaceTimeGrid grid_2d(double T, int n) {
    geometry::SpaceDomain d;
    d.dim = 2;
    d.lower = {0.0, 0.0};
    d.upper = {1.0, 1.0};
    return geometry::build_grid(T, d, n, {n, n});
}

}  // namespace

TEST_CASE("gauss_legendre integrates polynomials exactly") {
    for (int order = 1; order <= 8; ++order) {
        auto rule = transport::gauss_legendre(order);
        double wsum = 0.0;
        for (double w : rule.weights) wsum += w;
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
        // exact through degree 2*order-1 on (0,1)
        for (int deg = 0; deg <= 2 * order - 1; ++deg) {
            double q = 0.0;
            for (int k = 0; k < order; ++k)
                q += rule.weights[k] * std::pow(rule.points[k], deg);
            CHECK(q == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-13));
        }
    }
}

TEST_CASE("basis weights sum to the space-time volume") {
    auto rule = transport::gauss_legendre(2);
    CHECK(transport::assemble_basis(grid_1d(1.0, 3), rule).W.sum() ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(transport::assemble_basis(grid_2d(2.0, 2), rule).W.sum() ==
          doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("partition of unity") {
    auto rule = transport::gauss_legendre(2);
    auto basis = transport::assemble_basis(grid_2d(1.0, 3), rule);
    Vector ones = Vector::Ones(basis.S.cols());
    Vector at_quad = basis.S * ones;
    CHECK((at_quad.array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("advection of multilinear interpolants is exact") {
    auto g = grid_1d(1.0, 3);
    auto rule = transport::gauss_legendre(2);
    auto basis = transport::assemble_basis(g, rule);

    SUBCASE("time ramp, any velocity") {
        auto adv = transport::assemble_advection(g, {0.7}, rule);
        Vector c = transport::interpolate(expr::parse("t"), g);
        Vector d = adv.D * c;
        CHECK((d.array() - 1.0).abs().maxCoeff() < 1e-13);
    }
    SUBCASE("space ramp carries the velocity") {
        auto adv = transport::assemble_advection(g, {2.0}, rule);
        Vector c = transport::interpolate(expr::parse("x"), g);
        Vector d = adv.D * c;
        CHECK((d.array() - 2.0).abs().maxCoeff() < 1e-13);
    }
    SUBCASE("bilinear product rule") {
        auto adv = transport::assemble_advection(g, {1.0}, rule);
        Vector c = transport::interpolate(expr::parse("t*x"), g);
        Vector d = adv.D * c;
        for (Eigen::Index q = 0; q < d.size(); ++q) {
            double expect = basis.coords[q][1] + basis.coords[q][0];  // x + t
            CHECK(d[q] == doctest::Approx(expect).epsilon(1e-13));
        }
    }
}

TEST_CASE("D annihilates constants and is linear") {
    auto g = grid_2d(1.0, 2);
    auto rule = transport::gauss_legendre(2);
    auto adv = transport::assemble_advection(g, {1.0, -0.5}, rule);
    Vector ones = Vector::Ones(adv.D.cols());
    CHECK((adv.D * ones).cwiseAbs().maxCoeff() < 1e-13);

    Vector c1 = transport::interpolate(expr::parse("t*x"), g);
    Vector c2 = transport::interpolate(expr::parse("x*y"), g);
    Vector lhs = adv.D * (2.0 * c1 - 3.0 * c2);
    Vector rhs = 2.0 * (adv.D * c1) - 3.0 * (adv.D * c2);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("zero velocity leaves only the time derivative") {
    auto g = grid_1d(1.0, 3);
    auto rule = transport::gauss_legendre(2);
    auto adv = transport::assemble_advection(g, {0.0}, rule);
    Vector c = transport::interpolate(expr::parse("x"), g);
    CHECK((adv.D * c).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("interpolate samples nodes") {
    auto g = grid_1d(1.0, 2);
    Vector z = transport::interpolate(expr::parse("0"), g);
    CHECK(z.cwiseAbs().maxCoeff() == 0.0);

    Vector t = transport::interpolate(expr::parse("t"), g);
    CHECK(t[g.node_index(0, 0)] == 0.0);
    CHECK(t[g.node_index(1, 0)] == 0.5);
    CHECK(t[g.node_index(2, 0)] == 1.0);

    Vector s = transport::interpolate(expr::parse("sin(pi*x)"), g);
    CHECK(s[g.node_index(0, 1)] == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(transport::interpolate(expr::parse("vx"), g), EvalError);
}

TEST_CASE("l2 norms") {
    auto rule = transport::gauss_legendre(2);
    auto g = grid_1d(1.0, 2);
    auto basis = transport::assemble_basis(g, rule);

    CHECK(transport::l2_norm(Vector::Zero(basis.S.cols()), basis) == 0.0);
    CHECK(transport::l2_norm(Vector::Ones(basis.S.cols()), basis) ==
          doctest::Approx(1.0).epsilon(1e-14));

    // norm of the nodal interpolant of f = t*sin(pi x) converges to
    // sqrt((1/3)(1/2)) at second order under refinement
    double prev_err = 1e9;
    for (int n : {8, 16, 32}) {
        auto gf = grid_1d(1.0, n);
        auto bf = transport::assemble_basis(gf, rule);
        Vector fi = transport::interpolate(expr::parse("t*sin(pi*x)"), gf);
        double err = std::fabs(transport::l2_norm(fi, bf) - std::sqrt(1.0 / 6.0));
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 1e-3);

    // exact quadrature of a multilinear function: f = t*x on the unit square
    // in (t,x): integral of t^2 x^2 = 1/9
    auto f = transport::sample_at_quadrature(expr::parse("t*x"), basis, 1);
    CHECK(transport::l2_norm_samples(f, basis) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    CHECK_THROWS_AS(transport::l2_norm_samples(Vector::Zero(3), basis),
                    std::invalid_argument);
}

TEST_CASE("dimension mismatch") {
    auto rule = transport::gauss_legendre(2);
    CHECK_THROWS_AS(transport::assemble_advection(grid_1d(), {1.0, 2.0}, rule),
                    std::invalid_argument);
}
