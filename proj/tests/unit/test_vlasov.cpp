#include <doctest.h>

#include <cmath>
#include <random>

#include "stils/vlasov.hpp"

using namespace stils;
using vlasov::EMFields;
using vlasov::PhaseState;

namespace {

EMFields fields(const std::array<std::string, 3>& E, const std::array<std::string, 3>& B) {
    return EMFields::parse(E, B);
}

EMFields uniform_bz() { return fields({"0", "0", "0"}, {"0", "0", "1"}); }

}  // namespace

TEST_CASE("field_a assembles (1, v, E + v x B)") {
    PhaseState s;
    s.v = {1, 0, 0};
    auto a = vlasov::field_a(s, uniform_bz());
    CHECK(a[0] == 1.0);
    CHECK(a[1] == 1.0);
    CHECK(a[4] == 0.0);
    CHECK(a[5] == -1.0);  // (1,0,0) x (0,0,1)
    CHECK(a[6] == 0.0);

    auto ef = fields({"2", "0", "0"}, {"0", "0", "0"});
    s.v = {3, -1, 2};
    auto a2 = vlasov::field_a(s, ef);
    CHECK(a2[4] == 2.0);
    CHECK(a2[5] == 0.0);
    CHECK(a2[6] == 0.0);

    s.v = {0, 0, 0};
    auto a3 = vlasov::field_a(s, fields({"0", "0", "0"}, {"1", "2", "3"}));
    CHECK(a3[4] == 0.0);
    CHECK(a3[5] == 0.0);
    CHECK(a3[6] == 0.0);
}

TEST_CASE("phase-space divergence vanishes") {
    PhaseState s;
    s.t = 0.3;
    s.x = {0.2, -0.1, 0.0};
    s.v = {1.0, 2.0, -0.5};
    CHECK(std::fabs(vlasov::divergence_a(s, uniform_bz())) < 1e-10);

    auto fancy = fields({"t", "x", "y"}, {"sin(t+x)", "cos(y)", "x*y"});
    CHECK(std::fabs(vlasov::divergence_a(s, fancy)) <= 1e-6);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        PhaseState r;
        r.t = std::fabs(u(rng));
        r.x = {u(rng), u(rng), u(rng)};
        r.v = {u(rng), u(rng), u(rng)};
        worst = std::max(worst, std::fabs(vlasov::divergence_a(r, fancy)));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("gyration in a uniform magnetic field") {
    PhaseState s;
    s.v = {1, 0, 0};
    double dt = 2.0 * M_PI / 1000.0;
    auto traj = vlasov::flow_rk4(s, uniform_bz(), dt, 1000);
    CHECK(traj.size() == 1001);
    const auto& end = traj.back();
    // closed orbit: v(t) = (cos t, -sin t, 0), x(t) = (sin t, cos t - 1, 0)
    CHECK(std::fabs(end.x[0] - 0.0) <= 1e-6);
    CHECK(std::fabs(end.x[1] - 0.0) <= 1e-6);
    CHECK(std::fabs(end.v[0] - 1.0) <= 1e-6);
    CHECK(std::fabs(end.v[1] - 0.0) <= 1e-6);

    // halfway around
    const auto& mid = traj[500];
    CHECK(mid.v[0] == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(mid.x[1] == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("constant force is integrated exactly") {
    PhaseState s;
    auto traj = vlasov::flow_rk4(s, fields({"1", "0", "0"}, {"0", "0", "0"}), 0.1, 10);
    const auto& end = traj.back();
    CHECK(end.v[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(end.x[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(end.v[1] == 0.0);
}

TEST_CASE("magnetic force conserves speed") {
    PhaseState s;
    s.v = {0.6, -0.8, 0.3};
    auto B = fields({"0", "0", "0"}, {"sin(x)", "cos(t)", "1"});
    auto traj = vlasov::flow_rk4(s, B, 1e-3, 1000);
    double v0 = std::sqrt(s.v[0] * s.v[0] + s.v[1] * s.v[1] + s.v[2] * s.v[2]);
    double drift = 0.0;
    for (const auto& p : traj) {
        double vn = std::sqrt(p.v[0] * p.v[0] + p.v[1] * p.v[1] + p.v[2] * p.v[2]);
        drift = std::max(drift, std::fabs(vn - v0));
    }
    CHECK(drift <= 1e-8);
}

TEST_CASE("RK4 endpoint error decays at fourth order") {
    auto endpoint_err = [](int nsteps) {
        PhaseState s;
        s.v = {1, 0, 0};
        auto traj = vlasov::flow_rk4(s, uniform_bz(), 2.0 * M_PI / nsteps, nsteps);
        const auto& e = traj.back();
        return std::sqrt(e.x[0] * e.x[0] + e.x[1] * e.x[1] +
                         (e.v[0] - 1.0) * (e.v[0] - 1.0) + e.v[1] * e.v[1]);
    };
    double e1 = endpoint_err(250), e2 = endpoint_err(500);
    CHECK(std::log2(e1 / e2) >= 3.9);
}

TEST_CASE("integration failures carry the step index") {
    CHECK_THROWS_AS(vlasov::flow_rk4(PhaseState{}, uniform_bz(), -1.0, 10),
                    std::invalid_argument);
    PhaseState runaway;
    runaway.v = {1, 0, 0};
    auto blowup = fields({"exp(t)*exp(x)", "0", "0"}, {"0", "0", "0"});
    CHECK_THROWS_AS(vlasov::flow_rk4(runaway, blowup, 50.0, 40), std::runtime_error);
}

TEST_CASE("vlasov ratio: zero function passes vacuously") {
    vlasov::VlasovTestFunction tf;
    tf.f = expr::parse("0");
    tf.support = {{"x", {0.0, 1.0}}, {"vx", {0.0, 1.0}}};
    auto rep = vlasov::vlasov_ratio(tf, fields({"0", "0", "0"}, {"0", "0", "0"}), 1.0);
    CHECK(rep.lhs == 0.0);
    CHECK(rep.rhs == 0.0);
    CHECK(rep.pass);
}

namespace {

const char* kBump = "t*(4*x*(1-x))^2*(4*vx*(1-vx))^2";

vlasov::VlasovTestFunction bump_fn(const char* text = kBump) {
    vlasov::VlasovTestFunction tf;
    tf.f = expr::parse(text);
    tf.support = {{"x", {0.0, 1.0}}, {"vx", {0.0, 1.0}}};
    return tf;
}

}  // namespace

TEST_CASE("kinetic special case certified and cross-checked") {
    auto zero = fields({"0", "0", "0"}, {"0", "0", "0"});
    auto rep = vlasov::vlasov_ratio(bump_fn(), zero, 1.0, 6);
    CHECK(rep.inflow_ok);
    CHECK(rep.pass);
    CHECK(rep.ratio <= 2.0);

    // independent route: midpoint rule on a fine lattice, analytic derivative
    // of t*q(x)*q(vx) with q(s) = (4 s (1-s))^2
    auto q = [](double s) { double u = 4 * s * (1 - s); return u * u; };
    auto dq = [](double s) { double u = 4 * s * (1 - s); return 2 * u * (4 - 8 * s); };
    const int n = 60;
    double lhs2 = 0.0, rhs2 = 0.0, h = 1.0 / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double t = (i + 0.5) * h, x = (j + 0.5) * h, vx = (k + 0.5) * h;
                double f = t * q(x) * q(vx);
                double adv = q(x) * q(vx) + vx * t * dq(x) * q(vx);
                lhs2 += f * f * h * h * h;
                rhs2 += adv * adv * h * h * h;
            }
    CHECK(rep.lhs == doctest::Approx(std::sqrt(lhs2)).epsilon(2e-3));
    CHECK(rep.rhs == doctest::Approx(std::sqrt(rhs2)).epsilon(2e-3));
}

TEST_CASE("magnetic field case passes the bound") {
    vlasov::VlasovTestFunction tf;
    tf.f = expr::parse(kBump);
    tf.support = {{"x", {0.0, 1.0}}, {"vx", {0.0, 1.0}}, {"vy", {-1.0, 1.0}}};
    auto rep = vlasov::vlasov_ratio(tf, uniform_bz(), 1.0, 6);
    CHECK(rep.inflow_ok);
    CHECK(rep.pass);
    CHECK(rep.ratio <= 2.0);
}

TEST_CASE("ratio is invariant under rescaling the test function") {
    auto zero = fields({"0", "0", "0"}, {"0", "0", "0"});
    auto r1 = vlasov::vlasov_ratio(bump_fn(), zero, 1.0, 6);
    auto r10 = vlasov::vlasov_ratio(bump_fn("10*t*(4*x*(1-x))^2*(4*vx*(1-vx))^2"),
                                    zero, 1.0, 6);
    CHECK(r10.ratio == doctest::Approx(r1.ratio).epsilon(1e-9));
    CHECK(r10.lhs == doctest::Approx(10.0 * r1.lhs).epsilon(1e-9));
}

TEST_CASE("undeclared coordinates are rejected") {
    vlasov::VlasovTestFunction tf;
    tf.f = expr::parse("t*vy");
    tf.support = {{"x", {0.0, 1.0}}};
    CHECK_THROWS_AS(vlasov::vlasov_ratio(tf, uniform_bz(), 1.0), std::invalid_argument);
}

TEST_CASE("unbounded support is rejected") {
    vlasov::VlasovTestFunction tf;
    tf.f = expr::parse("t");
    tf.support = {{"x", {1.0, 0.0}}};
    CHECK_THROWS_AS(vlasov::vlasov_ratio(tf, uniform_bz(), 1.0), std::invalid_argument);
}
