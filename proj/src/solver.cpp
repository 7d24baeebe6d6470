#include "stils/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace stils::solver {

NormalSystem assemble_system(const transport::AdvectionSamples& adv,
                             const transport::BasisEval& basis,
                             const Vector& g_samples,
                             const geometry::ConstraintSet& constraints) {
    const Eigen::Index nquad = basis.W.size();
    const Eigen::Index ndof = adv.D.cols();
    if (adv.D.rows() != nquad || g_samples.size() != nquad)
        throw std::invalid_argument("inconsistent shapes in system assembly");
    if (!g_samples.allFinite())
        throw std::invalid_argument("right-hand-side samples must be finite");

    NormalSystem sys;
    sys.full_to_reduced.assign(ndof, -1);
    {
        std::size_t c = 0;
        for (int i = 0; i < ndof; ++i) {
            if (c < constraints.indices.size() && constraints.indices[c] == i) {
                ++c;
                continue;
            }
            sys.full_to_reduced[i] = static_cast<int>(sys.reduced_to_full.size());
            sys.reduced_to_full.push_back(i);
        }
    }
    const int m = static_cast<int>(sys.reduced_to_full.size());

    // A = sqrt(W) * D restricted to free columns, so K = A^T A is SPD by construction.
    Vector sqrt_w = basis.W.cwiseSqrt();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(adv.D.nonZeros());
    for (Eigen::Index q = 0; q < nquad; ++q)
        for (transport::SparseMatrix::InnerIterator it(adv.D, q); it; ++it) {
            int r = sys.full_to_reduced[it.col()];
            if (r >= 0) trips.emplace_back(q, r, it.value() * sqrt_w[q]);
        }
    Eigen::SparseMatrix<double> A(nquad, m);
    A.setFromTriplets(trips.begin(), trips.end());

    Eigen::SparseMatrix<double> K = Eigen::SparseMatrix<double>(A.transpose()) * A;
    // symmetrize away product roundoff
    sys.K = 0.5 * (K + Eigen::SparseMatrix<double>(K.transpose()));
    sys.b = A.transpose() * (sqrt_w.cwiseProduct(g_samples));
    return sys;
}

namespace {

/// PCG on K x = b with optional Jacobi preconditioner. Returns (x, iters, relres).
struct CgOutcome {
    Vector x;
    int iterations = 0;
    double relres = 0.0;
    bool converged = true;
};

CgOutcome pcg(const Eigen::SparseMatrix<double>& K, const Vector& b,
              const SolverConfig& cfg) {
    const Eigen::Index m = K.rows();
    CgOutcome out;
    out.x = Vector::Zero(m);
    double bnorm = b.norm();
    if (bnorm == 0.0) return out;

    int maxit = cfg.max_iterations > 0 ? cfg.max_iterations
                                       : 10 * static_cast<int>(m);
    Vector inv_diag(m);
    if (cfg.jacobi_preconditioner) {
        for (Eigen::Index i = 0; i < m; ++i) {
            double d = K.coeff(i, i);
            inv_diag[i] = d > 0.0 ? 1.0 / d : 1.0;
        }
    }

    Vector r = b;
    Vector z = cfg.jacobi_preconditioner ? Vector(inv_diag.cwiseProduct(r)) : r;
    Vector p = z;
    double rz = r.dot(z);
    out.relres = r.norm() / bnorm;

    for (int k = 0; k < maxit; ++k) {
        if (out.relres <= cfg.tolerance) {
            out.iterations = k;
            return out;
        }
        Vector Kp = K * p;
        double alpha = rz / p.dot(Kp);
        out.x += alpha * p;
        r -= alpha * Kp;
        out.relres = r.norm() / bnorm;
        z = cfg.jacobi_preconditioner ? Vector(inv_diag.cwiseProduct(r)) : r;
        double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    out.iterations = maxit;
    out.converged = out.relres <= cfg.tolerance;
    return out;
}

}  // namespace

Solution cg_solve(const NormalSystem& system, const SolverConfig& cfg) {
    if (!(cfg.tolerance > 0.0 && cfg.tolerance < 1.0))
        throw std::invalid_argument("tolerance must lie in (0,1)");

    CgOutcome out = pcg(system.K, system.b, cfg);
    if (!out.converged) {
        std::vector<double> best(out.x.data(), out.x.data() + out.x.size());
        throw NoConvergenceError("conjugate gradients did not converge", std::move(best),
                                 out.iterations, out.relres);
    }

    Solution sol;
    sol.f = Vector::Zero(system.full_to_reduced.size());
    for (std::size_t r = 0; r < system.reduced_to_full.size(); ++r)
        sol.f[system.reduced_to_full[r]] = out.x[static_cast<Eigen::Index>(r)];
    sol.iterations = out.iterations;
    sol.residual = out.relres;
    return sol;
}

TransportResult solve_transport(const TransportCase& tc) {
    TransportResult res;
    auto rule = transport::gauss_legendre(tc.quad_order);
    res.basis = transport::assemble_basis(tc.grid, rule);
    auto adv = transport::assemble_advection(tc.grid, tc.v, rule);
    auto faces = geometry::classify_faces(tc.grid, tc.v);
    auto constraints = geometry::constrained_dofs(tc.grid, faces);

    Vector g_samples =
        transport::sample_at_quadrature(tc.G, res.basis, tc.grid.dim(), tc.v);
    res.l2_G = transport::l2_norm_samples(g_samples, res.basis);

    auto sys = assemble_system(adv, res.basis, g_samples, constraints);
    res.f = cg_solve(sys, tc.cfg);
    res.f.l2_f = transport::l2_norm(res.f.f, res.basis);
    res.f.l2_misfit =
        transport::l2_norm_samples(Vector(adv.D * res.f.f - g_samples), res.basis);

    res.g = lifting::lift(tc.u0, tc.ub, tc.v, tc.grid);
    res.u = res.f.f + res.g.coefficients;
    return res;
}

StabilityReport stability_check(const Solution& f, double G_norm, double T) {
    StabilityReport rep;
    if (G_norm == 0.0) {
        if (f.l2_f > 1e-10)
            throw std::runtime_error("zero right-hand side produced a nonzero solution");
        rep.ratio = 0.0;
        rep.pass = true;
        return rep;
    }
    rep.ratio = f.l2_f / G_norm;
    rep.pass = rep.ratio <= 2.0 * T * (1.0 + 1e-8);
    return rep;
}

}  // namespace stils::solver
