#pragma once

#include <optional>
#include <string>

#include "topopt/design.hpp"
#include "topopt/grid.hpp"
#include "topopt/tension.hpp"

namespace topopt {

// Complete problem statement: geometry, supports, loads, material, and
// the material budget as a fraction of the design domain.
struct ProblemDefinition {
    StructuredGrid grid;
    std::vector<int> fixed_dofs;
    std::vector<PointLoad> loads;
    SimpMaterial material;
    double volume_fraction = 0.5;
    std::optional<TensionConfig> tension;
    // Declared mirror symmetry about the vertical midline. The optimizer
    // evaluates sensitivities symmetrically for such problems, so the
    // design stays exactly symmetric instead of drifting through
    // round-off amplified by the density feedback.
    bool mirror_symmetric = false;

    BoundaryConditions boundary_conditions() const {
        return BoundaryConditions(grid, fixed_dofs, loads);
    }

    // Uniform feasible start: rho_e = volume_fraction everywhere.
    DesignField initial_field(double rho_min = 1e-3) const;

    void validate() const;
};

// Canonical benchmarks.
//   cantilever: left edge fully fixed, unit downward load at the
//               right-edge midheight node.
//   mbb:        symmetry half-model; left-edge x dofs fixed, bottom-right
//               corner y-fixed, unit downward load at the top-left node.
//   bridge:     bottom corner nodes pinned (x and y), uniform unit
//               downward loads on the free bottom-edge nodes. A
//               reconstruction in spirit of the classic cable-bridge
//               setting; no authoritative geometry exists for it.
ProblemDefinition builtin_problem(const std::string& name, int nx, int ny,
                                  double volume_fraction);

// Line-oriented key=value problem files, '#' comments. Keys: nx, ny,
// elem_w, elem_h, thickness, E0, nu, penalty, volfrac, tension_k, and
// repeated fix=<node>,<x|y|xy> / load=<node>,<x|y>,<magnitude> entries.
// Node indices follow the StructuredGrid numbering.
ProblemDefinition load_problem(const std::string& contents);

}  // namespace topopt
