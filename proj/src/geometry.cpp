#include "stils/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stils::geometry {

void SpaceDomain::validate() const {
    if (dim < 1 || dim > 2) throw std::invalid_argument("spatial dimension must be 1 or 2");
    for (int i = 0; i < dim; ++i)
        if (!(lower[i] < upper[i]))
            throw std::invalid_argument("domain bounds inverted on axis " + std::to_string(i));
}

double SpaceDomain::volume() const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= upper[i] - lower[i];
    return v;
}

int SpaceTimeGrid::num_nodes() const {
    int n = nt + 1;
    for (int i = 0; i < dim(); ++i) n *= nx[i] + 1;
    return n;
}

int SpaceTimeGrid::num_cells() const {
    int n = nt;
    for (int i = 0; i < dim(); ++i) n *= nx[i];
    return n;
}

std::array<int, 3> SpaceTimeGrid::nodes_per_axis() const {
    return {nt + 1, nx[0] + 1, dim() == 2 ? nx[1] + 1 : 1};
}

int SpaceTimeGrid::node_index(int it, int i0, int i1) const {
    auto n = nodes_per_axis();
    return (it * n[1] + i0) * n[2] + i1;
}

std::array<double, 3> SpaceTimeGrid::node_coords(int it, int i0, int i1) const {
    std::array<double, 3> c{};
    c[0] = it * ht();
    c[1] = domain.lower[0] + i0 * hx(0);
    if (dim() == 2) c[2] = domain.lower[1] + i1 * hx(1);
    return c;
}

SpaceTimeGrid build_grid(double T, const SpaceDomain& domain, int nt,
                         const std::vector<int>& nx) {
    domain.validate();
    if (!(T > 0.0)) throw std::invalid_argument("final time T must be positive");
    if (nt < 1) throw std::invalid_argument("nt must be at least 1");
    if (static_cast<int>(nx.size()) != domain.dim)
        throw std::invalid_argument("nx size must match spatial dimension");
    SpaceTimeGrid g;
    g.T = T;
    g.domain = domain;
    g.nt = nt;
    for (int i = 0; i < domain.dim; ++i) {
        if (nx[i] < 1) throw std::invalid_argument("nx must be at least 1 on every axis");
        g.nx[i] = nx[i];
    }
    return g;
}

const BoundaryFace& FaceClassification::face(int axis, int side) const {
    for (const auto& f : faces)
        if (f.axis == axis && f.side == side) return f;
    throw std::invalid_argument("no such boundary face");
}

FaceClassification classify_faces(const SpaceTimeGrid& grid,
                                  const std::vector<double>& v, double eps) {
    if (static_cast<int>(v.size()) != grid.dim())
        throw std::invalid_argument("velocity dimension must match grid");
    if (eps < 0) throw std::invalid_argument("eps must be nonnegative");
    for (double vi : v)
        if (!std::isfinite(vi)) throw std::invalid_argument("velocity must be finite");

    FaceClassification fc;
    fc.dim = grid.dim();
    for (int i = 0; i < grid.dim(); ++i) fc.velocity[i] = v[i];

    auto classify = [eps](double flux) {
        if (flux < -eps) return FaceClass::Inflow;
        if (flux > eps) return FaceClass::Outflow;
        return FaceClass::Characteristic;
    };

    for (int axis = 0; axis <= grid.dim(); ++axis) {
        for (int side = 0; side < 2; ++side) {
            BoundaryFace f;
            f.axis = axis;
            f.side = side;
            double normal = side == 0 ? -1.0 : 1.0;
            f.flux = axis == 0 ? normal : v[axis - 1] * normal;
            f.cls = classify(f.flux);
            fc.faces.push_back(f);
        }
    }
    return fc;
}

bool ConstraintSet::contains(int node) const {
    return std::binary_search(indices.begin(), indices.end(), node);
}

ConstraintSet constrained_dofs(const SpaceTimeGrid& grid,
                               const FaceClassification& faces) {
    if (faces.dim != grid.dim())
        throw std::invalid_argument("face classification does not match grid");

    auto n = grid.nodes_per_axis();
    std::vector<char> mark(grid.num_nodes(), 0);

    auto mark_face = [&](int axis, int side) {
        int fixed = side == 0 ? 0 : (axis == 0 ? grid.nt : grid.nx[axis - 1]);
        for (int it = 0; it < n[0]; ++it)
            for (int i0 = 0; i0 < n[1]; ++i0)
                for (int i1 = 0; i1 < n[2]; ++i1) {
                    int idx[3] = {it, i0, i1};
                    if (idx[axis] == fixed) mark[grid.node_index(it, i0, i1)] = 1;
                }
    };

    for (const auto& f : faces.faces)
        if (f.cls == FaceClass::Inflow) mark_face(f.axis, f.side);

    ConstraintSet cs;
    cs.num_nodes = grid.num_nodes();
    for (int i = 0; i < grid.num_nodes(); ++i)
        if (mark[i]) cs.indices.push_back(i);
    return cs;
}

}  // namespace stils::geometry
