#include "stils/poincare.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace stils::poincare {

using transport::Vector;

namespace {

/// K = X^T W X restricted to the free dofs, symmetric by construction.
Eigen::SparseMatrix<double> reduced_gram(const transport::SparseMatrix& X,
                                         const Vector& W,
                                         const std::vector<int>& full_to_reduced,
                                         int m) {
    Vector sqrt_w = W.cwiseSqrt();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(X.nonZeros());
    for (Eigen::Index q = 0; q < X.rows(); ++q)
        for (transport::SparseMatrix::InnerIterator it(X, q); it; ++it) {
            int r = full_to_reduced[it.col()];
            if (r >= 0) trips.emplace_back(q, r, it.value() * sqrt_w[q]);
        }
    Eigen::SparseMatrix<double> A(X.rows(), m);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseMatrix<double> G = Eigen::SparseMatrix<double>(A.transpose()) * A;
    return 0.5 * (G + Eigen::SparseMatrix<double>(G.transpose()));
}

}  // namespace

RayleighResult discrete_constant(const geometry::SpaceTimeGrid& grid,
                                 const std::vector<double>& v,
                                 const EigenConfig& cfg, int quad_order) {
    auto rule = transport::gauss_legendre(quad_order);
    auto basis = transport::assemble_basis(grid, rule);
    auto adv = transport::assemble_advection(grid, v, rule);
    auto faces = geometry::classify_faces(grid, v);
    auto constraints = geometry::constrained_dofs(grid, faces);

    std::vector<int> full_to_reduced(grid.num_nodes(), -1);
    int m = 0;
    {
        std::size_t c = 0;
        for (int i = 0; i < grid.num_nodes(); ++i) {
            if (c < constraints.indices.size() && constraints.indices[c] == i) {
                ++c;
                continue;
            }
            full_to_reduced[i] = m++;
        }
    }

    Eigen::SparseMatrix<double> K = reduced_gram(adv.D, basis.W, full_to_reduced, m);
    Eigen::SparseMatrix<double> M = reduced_gram(basis.S, basis.W, full_to_reduced, m);

    // inner CG shares the reduced system machinery
    solver::NormalSystem inner;
    inner.K = K;
    inner.reduced_to_full.resize(m);
    inner.full_to_reduced.resize(m);
    for (int i = 0; i < m; ++i) {
        inner.reduced_to_full[i] = i;
        inner.full_to_reduced[i] = i;
    }
    solver::SolverConfig cg_cfg;
    cg_cfg.tolerance = cfg.cg_tolerance;

    std::mt19937 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Vector x(m);
    for (int i = 0; i < m; ++i) x[i] = uni(rng);
    x /= std::sqrt(x.dot(M * x));

    // Subspace-accelerated inverse iteration: expand an M-orthonormal basis
    // with K^{-1} M applied to the current Ritz vector, then Rayleigh-Ritz on
    // the accumulated subspace. Plain inverse iteration stalls when the two
    // lowest eigenvalues cluster at larger |v|; the projection step is robust
    // to that and to the inexact inner CG solves.
    RayleighResult res;
    const int cap = cfg.max_iterations + 1;
    Eigen::MatrixXd Q(m, cap), KQ(m, cap), MQ(m, cap);
    Q.col(0) = x;
    KQ.col(0) = K * x;
    MQ.col(0) = M * x;
    int kk = 1;
    Vector ritz = x;
    for (int k = 1; k <= cfg.max_iterations; ++k) {
        inner.b = M * ritz;
        Vector w = cg_solve(inner, cg_cfg).f;

        // M-orthogonalize against the basis (twice, for stability)
        for (int pass = 0; pass < 2; ++pass)
            w -= Q.leftCols(kk) * (MQ.leftCols(kk).transpose() * w);
        double nrm = std::sqrt(w.dot(M * w));
        if (nrm < 1e-13) {
            // stagnated within solver accuracy; inject a fresh direction
            for (int i = 0; i < m; ++i) w[i] = uni(rng);
            for (int pass = 0; pass < 2; ++pass)
                w -= Q.leftCols(kk) * (MQ.leftCols(kk).transpose() * w);
            nrm = std::sqrt(w.dot(M * w));
            if (nrm < 1e-13) break;
        }
        w /= nrm;
        Q.col(kk) = w;
        KQ.col(kk) = K * w;
        MQ.col(kk) = M * w;
        ++kk;

        Eigen::MatrixXd Kp = Q.leftCols(kk).transpose() * KQ.leftCols(kk);
        Eigen::MatrixXd Mp = Q.leftCols(kk).transpose() * MQ.leftCols(kk);
        Kp = 0.5 * (Kp + Kp.transpose().eval());
        Mp = 0.5 * (Mp + Mp.transpose().eval());
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kp, Mp);
        ritz = Q.leftCols(kk) * es.eigenvectors().col(0);

        Vector Kr = K * ritz;
        Vector Mr = M * ritz;
        double lambda = ritz.dot(Kr) / ritz.dot(Mr);
        double residual = (Kr - lambda * Mr).norm() / Mr.norm();
        ritz /= std::sqrt(ritz.dot(Mr));

        res.lambda_min = lambda;
        res.C_h = 1.0 / std::sqrt(lambda);
        res.iterations = k;
        res.eigen_residual = residual;
        res.eigenvector = ritz;
        if (residual <= cfg.tolerance) return res;
    }
    std::vector<double> best(res.eigenvector.data(),
                             res.eigenvector.data() + res.eigenvector.size());
    throw NoConvergenceError("inverse power iteration did not converge (best lambda " +
                                 std::to_string(res.lambda_min) + ")",
                             std::move(best), res.iterations, res.eigen_residual);
}

namespace {

struct Quad1D {
    std::vector<double> pts;  // on (0,1) within each of n equal cells, scaled out
    std::vector<double> wts;
};

Quad1D composite_rule(double lo, double hi, int cells, int order) {
    auto base = transport::gauss_legendre(order);
    Quad1D q;
    double h = (hi - lo) / cells;
    for (int c = 0; c < cells; ++c)
        for (int k = 0; k < order; ++k) {
            q.pts.push_back(lo + (c + base.points[k]) * h);
            q.wts.push_back(base.weights[k] * h);
        }
    return q;
}

expr::EvalContext point_context(double t, double x, double y, int dim,
                                const std::vector<double>& v) {
    expr::EvalContext ctx;
    ctx["t"] = t;
    ctx["x"] = x;
    if (dim == 2) ctx["y"] = y;
    static const char* vnames[2] = {"vx", "vy"};
    for (std::size_t i = 0; i < v.size() && i < 2; ++i) ctx[vnames[i]] = v[i];
    return ctx;
}

}  // namespace

WeightCheckReport proof_identity_check(const expr::Expression& f,
                                       const std::vector<double>& v, double T,
                                       const geometry::SpaceDomain& domain,
                                       int cells_per_axis, int quad_order) {
    domain.validate();
    if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
    if (static_cast<int>(v.size()) != domain.dim)
        throw std::invalid_argument("velocity dimension must match domain");
    const int dim = domain.dim;

    auto feval = [&](double t, double x, double y) {
        return f.eval(point_context(t, x, y, dim, v));
    };

    WeightCheckReport rep;

    // inflow sampling: t=0 slice plus spatial faces with v.n < 0
    {
        const int ns = cells_per_axis * quad_order + 1;
        auto sample_axis = [&](int i, int k) {
            return domain.lower[i] + (domain.upper[i] - domain.lower[i]) * k / (ns - 1);
        };
        for (int i = 0; i < ns; ++i)
            for (int j = 0; j < (dim == 2 ? ns : 1); ++j) {
                double val = std::fabs(feval(0.0, sample_axis(0, i), dim == 2 ? sample_axis(1, j) : 0.0));
                rep.inflow_max = std::max(rep.inflow_max, val);
            }
        for (int ax = 0; ax < dim; ++ax) {
            for (int side = 0; side < 2; ++side) {
                double flux = v[ax] * (side == 0 ? -1.0 : 1.0);
                if (!(flux < 0.0)) continue;
                double fixed = side == 0 ? domain.lower[ax] : domain.upper[ax];
                for (int i = 0; i < ns; ++i)
                    for (int j = 0; j < (dim == 2 ? ns : 1); ++j) {
                        double t = T * i / (ns - 1);
                        double other = dim == 2 ? sample_axis(1 - ax, j) : 0.0;
                        double x = ax == 0 ? fixed : other;
                        double y = ax == 0 ? other : fixed;
                        rep.inflow_max = std::max(rep.inflow_max, std::fabs(feval(t, x, y)));
                    }
            }
        }
        rep.inflow_ok = rep.inflow_max <= 1e-10;
    }

    // interior: integral of f^2 + 2 w f (a.grad f), derivative along a by
    // central differences
    const double h_fd = 1e-6;
    auto adv_deriv = [&](double t, double x, double y) {
        double fp = feval(t + h_fd, x + h_fd * v[0], y + (dim == 2 ? h_fd * v[1] : 0.0));
        double fm = feval(t - h_fd, x - h_fd * v[0], y - (dim == 2 ? h_fd * v[1] : 0.0));
        return (fp - fm) / (2.0 * h_fd);
    };

    Quad1D qt = composite_rule(0.0, T, cells_per_axis, quad_order);
    Quad1D qx = composite_rule(domain.lower[0], domain.upper[0], cells_per_axis, quad_order);
    Quad1D qy = dim == 2 ? composite_rule(domain.lower[1], domain.upper[1], cells_per_axis,
                                          quad_order)
                         : Quad1D{{0.0}, {1.0}};

    double interior = 0.0;
    for (std::size_t i = 0; i < qt.pts.size(); ++i)
        for (std::size_t j = 0; j < qx.pts.size(); ++j)
            for (std::size_t k = 0; k < qy.pts.size(); ++k) {
                double t = qt.pts[i], x = qx.pts[j], y = qy.pts[k];
                double w = t - T;
                double fv = feval(t, x, y);
                double integrand = fv * fv + 2.0 * w * fv * adv_deriv(t, x, y);
                interior += qt.wts[i] * qx.wts[j] * qy.wts[k] * integrand;
            }
    rep.interior = interior;

    // outflow boundary: t=T contributes zero exactly (w = 0 there); spatial
    // faces with v.n > 0 carry w f^2 (v.n)
    double boundary = 0.0;
    for (int ax = 0; ax < dim; ++ax)
        for (int side = 0; side < 2; ++side) {
            double flux = v[ax] * (side == 0 ? -1.0 : 1.0);
            if (!(flux > 0.0)) continue;
            double fixed = side == 0 ? domain.lower[ax] : domain.upper[ax];
            const Quad1D& qo = ax == 0 ? qy : qx;
            for (std::size_t i = 0; i < qt.pts.size(); ++i)
                for (std::size_t j = 0; j < (dim == 2 ? qo.pts.size() : 1); ++j) {
                    double t = qt.pts[i];
                    double other = dim == 2 ? qo.pts[j] : 0.0;
                    double x = ax == 0 ? fixed : other;
                    double y = ax == 0 ? other : fixed;
                    double fv = feval(t, x, y);
                    double wq = qt.wts[i] * (dim == 2 ? qo.wts[j] : 1.0);
                    boundary += wq * (t - T) * fv * fv * flux;
                }
        }
    rep.boundary = boundary;
    rep.residual = std::fabs(interior - boundary);
    rep.sign_pass = interior <= 1e-8;
    return rep;
}

}  // namespace stils::poincare
