#include "stils/vlasov.hpp"

#include <cmath>
#include <stdexcept>

#include "stils/transport.hpp"

namespace stils::vlasov {

namespace {

expr::EvalContext field_context(double t, const Vec3& x) {
    expr::EvalContext ctx;
    ctx["t"] = t;
    ctx["x"] = x[0];
    ctx["y"] = x[1];
    return ctx;
}

}  // namespace

EMFields EMFields::parse(const std::array<std::string, 3>& e,
                         const std::array<std::string, 3>& b) {
    EMFields f;
    for (int i = 0; i < 3; ++i) {
        f.E[i] = expr::parse(e[i]);
        f.B[i] = expr::parse(b[i]);
    }
    return f;
}

Vec3 EMFields::eval_E(double t, const Vec3& x) const {
    auto ctx = field_context(t, x);
    return {E[0].eval(ctx), E[1].eval(ctx), E[2].eval(ctx)};
}

Vec3 EMFields::eval_B(double t, const Vec3& x) const {
    auto ctx = field_context(t, x);
    return {B[0].eval(ctx), B[1].eval(ctx), B[2].eval(ctx)};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

std::array<double, 7> field_a(const PhaseState& state, const EMFields& fields) {
    Vec3 E = fields.eval_E(state.t, state.x);
    Vec3 B = fields.eval_B(state.t, state.x);
    Vec3 f = cross(state.v, B);
    return {1.0, state.v[0], state.v[1], state.v[2], E[0] + f[0], E[1] + f[1],
            E[2] + f[2]};
}

double divergence_a(const PhaseState& state, const EMFields& fields, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
    // sum of diagonal Jacobian entries of the 7-component field over (t,x,v)
    double div = 0.0;
    for (int c = 0; c < 7; ++c) {
        PhaseState sp = state, sm = state;
        double* coord_p;
        double* coord_m;
        if (c == 0) {
            coord_p = &sp.t;
            coord_m = &sm.t;
        } else if (c < 4) {
            coord_p = &sp.x[c - 1];
            coord_m = &sm.x[c - 1];
        } else {
            coord_p = &sp.v[c - 4];
            coord_m = &sm.v[c - 4];
        }
        double step = h * std::max(1.0, std::fabs(*coord_p));
        *coord_p += step;
        *coord_m -= step;
        div += (field_a(sp, fields)[c] - field_a(sm, fields)[c]) / (2.0 * step);
    }
    return div;
}

std::vector<PhaseState> flow_rk4(const PhaseState& state0, const EMFields& fields,
                                 double dt, int nsteps) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (nsteps < 1) throw std::invalid_argument("nsteps must be at least 1");

    auto rhs = [&fields](double t, const Vec3& x, const Vec3& v, Vec3& dx, Vec3& dv) {
        Vec3 E = fields.eval_E(t, x);
        Vec3 F = cross(v, fields.eval_B(t, x));
        dx = v;
        for (int i = 0; i < 3; ++i) dv[i] = E[i] + F[i];
    };

    std::vector<PhaseState> traj;
    traj.reserve(nsteps + 1);
    traj.push_back(state0);
    PhaseState s = state0;

    for (int step = 0; step < nsteps; ++step) {
        Vec3 k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v, xt, vt;
        rhs(s.t, s.x, s.v, k1x, k1v);
        for (int i = 0; i < 3; ++i) {
            xt[i] = s.x[i] + 0.5 * dt * k1x[i];
            vt[i] = s.v[i] + 0.5 * dt * k1v[i];
        }
        rhs(s.t + 0.5 * dt, xt, vt, k2x, k2v);
        for (int i = 0; i < 3; ++i) {
            xt[i] = s.x[i] + 0.5 * dt * k2x[i];
            vt[i] = s.v[i] + 0.5 * dt * k2v[i];
        }
        rhs(s.t + 0.5 * dt, xt, vt, k3x, k3v);
        for (int i = 0; i < 3; ++i) {
            xt[i] = s.x[i] + dt * k3x[i];
            vt[i] = s.v[i] + dt * k3v[i];
        }
        rhs(s.t + dt, xt, vt, k4x, k4v);
        for (int i = 0; i < 3; ++i) {
            s.x[i] += dt / 6.0 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i]);
            s.v[i] += dt / 6.0 * (k1v[i] + 2 * k2v[i] + 2 * k3v[i] + k4v[i]);
        }
        s.t += dt;
        for (int i = 0; i < 3; ++i)
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.v[i]))
                throw std::runtime_error("integration diverged at step " +
                                         std::to_string(step + 1));
        traj.push_back(s);
    }
    return traj;
}

namespace {

struct Axis {
    enum Kind { Time, Space, Velocity } kind;
    int component;  // index into x or v
    std::string name;
    double lo, hi;
};

int axis_component(const std::string& name, Axis::Kind& kind) {
    if (name == "x") { kind = Axis::Space; return 0; }
    if (name == "y") { kind = Axis::Space; return 1; }
    if (name == "vx") { kind = Axis::Velocity; return 0; }
    if (name == "vy") { kind = Axis::Velocity; return 1; }
    if (name == "vz") { kind = Axis::Velocity; return 2; }
    throw std::invalid_argument("unknown support coordinate '" + name + "'");
}

}  // namespace

RatioReport vlasov_ratio(const VlasovTestFunction& testfn, const EMFields& fields,
                         double T, int quad_order) {
    if (!(T > 0.0)) throw std::invalid_argument("T must be positive");

    std::vector<Axis> axes;
    axes.push_back({Axis::Time, -1, "t", 0.0, T});
    for (const auto& [name, box] : testfn.support) {
        Axis a;
        a.component = axis_component(name, a.kind);
        a.name = name;
        a.lo = box[0];
        a.hi = box[1];
        if (!(a.lo < a.hi) || !std::isfinite(a.lo) || !std::isfinite(a.hi))
            throw std::invalid_argument("support box must be bounded with lo < hi");
        axes.push_back(a);
    }

    for (const auto& var : testfn.f.free_vars()) {
        bool found = var == "t";
        for (const auto& a : axes) found = found || a.name == var;
        if (!found)
            throw std::invalid_argument("test function depends on undeclared coordinate '" +
                                        var + "'");
    }

    auto feval = [&](double t, const Vec3& x, const Vec3& v) {
        expr::EvalContext ctx;
        ctx["t"] = t;
        ctx["x"] = x[0];
        ctx["y"] = x[1];
        ctx["vx"] = v[0];
        ctx["vy"] = v[1];
        ctx["vz"] = v[2];
        return testfn.f.eval(ctx);
    };

    RatioReport rep;

    // inflow trace: t=0 slice plus the spatial faces of the support box
    {
        const int ns = 9;
        auto sample_all = [&](int fixed_axis, int side) {
            // odometer over the remaining axes
            std::vector<int> idx(axes.size(), 0);
            while (true) {
                Vec3 x{0, 0, 0}, v{0, 0, 0};
                double t = 0.0;
                for (std::size_t a = 0; a < axes.size(); ++a) {
                    double frac = static_cast<int>(a) == fixed_axis
                                      ? static_cast<double>(side)
                                      : static_cast<double>(idx[a]) / (ns - 1);
                    double val = axes[a].lo + frac * (axes[a].hi - axes[a].lo);
                    if (axes[a].kind == Axis::Time) t = val;
                    else if (axes[a].kind == Axis::Space) x[axes[a].component] = val;
                    else v[axes[a].component] = val;
                }
                rep.inflow_max = std::max(rep.inflow_max, std::fabs(feval(t, x, v)));
                std::size_t a = 0;
                for (; a < axes.size(); ++a) {
                    if (static_cast<int>(a) == fixed_axis) continue;
                    if (++idx[a] < ns) break;
                    idx[a] = 0;
                }
                if (a == axes.size()) break;
            }
        };
        sample_all(0, 0);  // t = 0
        for (std::size_t a = 1; a < axes.size(); ++a)
            if (axes[a].kind == Axis::Space) {
                sample_all(static_cast<int>(a), 0);
                sample_all(static_cast<int>(a), 1);
            }
        rep.inflow_ok = rep.inflow_max <= 1e-10;
    }

    // tensor Gauss quadrature over (0,T) x support
    auto rule = transport::gauss_legendre(quad_order);
    std::size_t npts = 1;
    for (std::size_t a = 0; a < axes.size(); ++a) npts *= quad_order;

    double lhs2 = 0.0, rhs2 = 0.0;
    std::vector<int> idx(axes.size(), 0);
    for (std::size_t p = 0; p < npts; ++p) {
        double t = 0.0;
        Vec3 x{0, 0, 0}, v{0, 0, 0};
        double wq = 1.0;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            double span = axes[a].hi - axes[a].lo;
            double val = axes[a].lo + rule.points[idx[a]] * span;
            wq *= rule.weights[idx[a]] * span;
            if (axes[a].kind == Axis::Time) t = val;
            else if (axes[a].kind == Axis::Space) x[axes[a].component] = val;
            else v[axes[a].component] = val;
        }

        double fv = feval(t, x, v);
        lhs2 += wq * fv * fv;

        Vec3 E = fields.eval_E(t, x);
        Vec3 F = cross(v, fields.eval_B(t, x));
        for (int i = 0; i < 3; ++i) F[i] += E[i];

        double adv = 0.0;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            double coord = axes[a].kind == Axis::Time ? t
                           : axes[a].kind == Axis::Space ? x[axes[a].component]
                                                         : v[axes[a].component];
            double step = 1e-5 * std::max(1.0, std::fabs(coord));
            double tp = t, tm = t;
            Vec3 xp = x, xm = x, vp = v, vm = v;
            if (axes[a].kind == Axis::Time) {
                tp += step;
                tm -= step;
            } else if (axes[a].kind == Axis::Space) {
                xp[axes[a].component] += step;
                xm[axes[a].component] -= step;
            } else {
                vp[axes[a].component] += step;
                vm[axes[a].component] -= step;
            }
            double deriv = (feval(tp, xp, vp) - feval(tm, xm, vm)) / (2.0 * step);
            double coeff = axes[a].kind == Axis::Time ? 1.0
                           : axes[a].kind == Axis::Space ? v[axes[a].component]
                                                         : F[axes[a].component];
            adv += coeff * deriv;
        }
        rhs2 += wq * adv * adv;

        for (std::size_t a = 0; a < axes.size(); ++a) {
            if (++idx[a] < quad_order) break;
            idx[a] = 0;
        }
    }

    rep.lhs = std::sqrt(lhs2);
    rep.rhs = std::sqrt(rhs2);
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    rep.pass = rep.lhs <= 2.0 * T * rep.rhs * (1.0 + 1e-4);
    return rep;
}

}  // namespace stils::vlasov
