#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace stils::geometry {

/// Axis-aligned spatial box, dimension 1 or 2.
struct SpaceDomain {
    int dim = 1;
    std::array<double, 2> lower{0.0, 0.0};
    std::array<double, 2> upper{1.0, 1.0};

    void validate() const;
    double volume() const;
};

/// Uniform tensor-product grid on (0,T) x Omega. Immutable after build_grid.
struct SpaceTimeGrid {
    double T = 1.0;
    SpaceDomain domain;
    int nt = 1;
    std::array<int, 2> nx{1, 1};

    int dim() const { return domain.dim; }
    int num_nodes() const;
    int num_cells() const;
    double ht() const { return T / nt; }
    double hx(int axis) const {
        return (domain.upper[axis] - domain.lower[axis]) / nx[axis];
    }

    /// Nodes per axis: {nt+1, nx0+1[, nx1+1]}.
    std::array<int, 3> nodes_per_axis() const;

    /// Node index, row-major in (t, x, y): t slowest, last spatial axis fastest.
    int node_index(int it, int i0, int i1 = 0) const;

    /// Coordinates of node: {t, x[, y]}.
    std::array<double, 3> node_coords(int it, int i0, int i1 = 0) const;
};

SpaceTimeGrid build_grid(double T, const SpaceDomain& domain, int nt,
                         const std::vector<int>& nx);

enum class FaceClass { Inflow, Outflow, Characteristic };

/// One side of the space-time box. Axis 0 is time; axes 1.. are space.
/// side = 0 for the lower face, 1 for the upper face.
struct BoundaryFace {
    int axis = 0;
    int side = 0;
    double flux = 0.0;  // a.n = n_t + v.n_x, constant on the face
    FaceClass cls = FaceClass::Characteristic;
};

struct FaceClassification {
    std::vector<BoundaryFace> faces;  // 2*(1+dim) faces, fixed order
    std::array<double, 2> velocity{0.0, 0.0};
    int dim = 1;

    const BoundaryFace& face(int axis, int side) const;
};

FaceClassification classify_faces(const SpaceTimeGrid& grid,
                                  const std::vector<double>& v,
                                  double eps = 1e-12);

/// Sorted node indices pinned to zero: closure of every inflow face.
struct ConstraintSet {
    std::vector<int> indices;  // strictly increasing
    int num_nodes = 0;

    bool contains(int node) const;
};

ConstraintSet constrained_dofs(const SpaceTimeGrid& grid,
                               const FaceClassification& faces);

}  // namespace stils::geometry
