#pragma once

#include <Eigen/Core>

#include "topopt/assembly.hpp"
#include "topopt/design.hpp"
#include "topopt/element.hpp"
#include "topopt/grid.hpp"

namespace topopt {

// Compliance u^T K u (twice the stored strain energy). Equals p^T u at
// equilibrium.
double compliance(const Displacements& u, const SparseMatrix& K);

// Per-element strain energies u_e^T k0 u_e (k0 at full density).
Eigen::VectorXd element_strain_energies(const StructuredGrid& grid,
                                        const ElementStiffness& k0,
                                        const Displacements& u);

// Analytic compliance gradient under the enforced equilibrium constraint:
// f,rho_e = -(p / rho_e) rho_e^p (u_e^T k0 u_e). Every component <= 0.
Eigen::VectorXd compliance_gradient(const Displacements& u, const DesignField& field,
                                    const SimpMaterial& mat, const StructuredGrid& grid,
                                    const ElementStiffness& k0);

// Central finite difference of compliance with equilibrium re-solved at
// rho_e +- step. Verification oracle for compliance_gradient; independent
// of the analytic formula.
double fd_compliance_derivative(const StructuredGrid& grid, const BoundaryConditions& bc,
                                const SimpMaterial& mat, const ElementStiffness& k0,
                                const DesignField& field, int elem, double step);

}  // namespace topopt
