#pragma once

#include <array>

#include "topopt/element.hpp"
#include "topopt/grid.hpp"

namespace topopt {

// 2D stress tensor, single shear component (symmetric by construction).
struct StressTensor2D {
    double sxx = 0.0;
    double syy = 0.0;
    double txy = 0.0;
};

// Stress tensors of one element at the four Gauss points, same order as
// gauss_points_2x2().
using ElementGaussStresses = std::array<StressTensor2D, 4>;

// sigma = C(E, nu) * B(xi_g) * u_e at each Gauss point of element `elem`.
// E is the effective modulus the stresses are evaluated with; pass the
// SIMP modulus rho^p * E0 to make stress-form energies match strain-form
// ones exactly.
ElementGaussStresses gauss_point_stresses(const StructuredGrid& grid, int elem,
                                          const Displacements& u, double E, double nu);

// Complementary energy density sigma : C^-1 : sigma of one tensor, i.e.
// (sxx^2 - 2 nu sxx syy + syy^2 + 2 (1+nu) txy^2) / E for plane stress.
double stress_energy_density(const StressTensor2D& s, double E, double nu);

// Stress-form element energy: sum over Gauss points of
// sigma : C^-1 : sigma * detJ * thickness. Equals the strain-form
// u_e^T K_e u_e when the stresses were computed with K_e's modulus.
double stress_form_energy(const StructuredGrid& grid, const ElementGaussStresses& s,
                          double E, double nu);

}  // namespace topopt
