#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "topopt/errors.hpp"

namespace topopt {

// Structured grid of nx-by-ny rectangular elements.
//
// Numbering conventions (fixed so that all outputs are reproducible):
//   node (i, j), i in [0, nx], j in [0, ny]  ->  node index j*(nx+1) + i
//   node n                                   ->  dofs (2n, 2n+1) = (x, y)
//   element (i, j), i in [0, nx), j in [0, ny)  ->  element index i*ny + j
//     (column-major: the index runs up each column of elements first)
// The y axis points up: j = 0 is the bottom row.
struct StructuredGrid {
    int nx = 0;
    int ny = 0;
    double elem_w = 1.0;
    double elem_h = 1.0;
    double thickness = 1.0;

    StructuredGrid() = default;
    StructuredGrid(int nx_, int ny_, double w = 1.0, double h = 1.0, double t = 1.0)
        : nx(nx_), ny(ny_), elem_w(w), elem_h(h), thickness(t) {
        validate();
    }

    void validate() const {
        if (nx < 1 || ny < 1)
            throw ParameterError("grid: nx and ny must be >= 1");
        if (elem_w <= 0.0 || elem_h <= 0.0 || thickness <= 0.0)
            throw ParameterError("grid: elem_w, elem_h, thickness must be > 0");
    }

    int num_elements() const { return nx * ny; }
    int num_nodes() const { return (nx + 1) * (ny + 1); }
    int num_dofs() const { return 2 * num_nodes(); }
    double element_volume() const { return elem_w * elem_h * thickness; }

    int node_index(int i, int j) const { return j * (nx + 1) + i; }
    int element_index(int i, int j) const { return i * ny + j; }
    std::pair<int, int> element_coords(int e) const { return {e / ny, e % ny}; }

    // Corner nodes of element e, counterclockwise from bottom-left.
    std::array<int, 4> element_nodes(int e) const {
        if (e < 0 || e >= num_elements())
            throw ParameterError("grid: element index " + std::to_string(e) + " out of range");
        const auto [i, j] = element_coords(e);
        return {node_index(i, j), node_index(i + 1, j),
                node_index(i + 1, j + 1), node_index(i, j + 1)};
    }

    // The 8 global dofs of element e, (x, y) per corner node.
    std::array<int, 8> element_dofs(int e) const {
        const auto n = element_nodes(e);
        return {2 * n[0], 2 * n[0] + 1, 2 * n[1], 2 * n[1] + 1,
                2 * n[2], 2 * n[2] + 1, 2 * n[3], 2 * n[3] + 1};
    }
};

// Point load on a single global dof.
struct PointLoad {
    int dof = 0;
    double magnitude = 0.0;
};

// Fixed dofs plus nodal point loads. Construction validates index ranges
// and rejects a load applied to a fixed dof.
class BoundaryConditions {
public:
    BoundaryConditions(const StructuredGrid& grid, std::vector<int> fixed_dofs,
                       std::vector<PointLoad> loads);

    const std::vector<int>& fixed_dofs() const { return fixed_; }
    const std::vector<PointLoad>& loads() const { return loads_; }
    int num_dofs() const { return num_dofs_; }
    bool is_fixed(int dof) const { return fixed_mask_[static_cast<size_t>(dof)] != 0; }

    // Full-length load vector (entries at fixed dofs are zero by the
    // fixed-and-loaded rejection above).
    Eigen::VectorXd load_vector() const;

private:
    int num_dofs_ = 0;
    std::vector<int> fixed_;          // sorted, unique
    std::vector<PointLoad> loads_;
    std::vector<std::uint8_t> fixed_mask_;
};

// Node displacements; entries at fixed dofs are exactly zero.
struct Displacements {
    Eigen::VectorXd u;
};

}  // namespace topopt
