#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "topopt/design.hpp"
#include "topopt/element.hpp"
#include "topopt/grid.hpp"

namespace topopt {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Global SIMP stiffness K(rho) = sum_e rho_e^p * scatter(k0). Symmetric;
// the result is independent of scheduling (per-element triplet slots are
// fixed, duplicates summed in a fixed order).
SparseMatrix assemble(const StructuredGrid& grid, const ElementStiffness& k0,
                      const DesignField& rho, double p);

// Direct factorization of the reduced SPD system (fixed dofs eliminated
// by row/column removal, so constrained entries are exactly zero).
// Accepted solves satisfy ||K_red u_red - p_red|| <= 1e-10 ||p||.
Displacements solve_equilibrium(const SparseMatrix& K, const BoundaryConditions& bc);

}  // namespace topopt
