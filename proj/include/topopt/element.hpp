#pragma once

#include <Eigen/Core>

#include <array>

#include "topopt/grid.hpp"

namespace topopt {

// Elastic stiffness of one bilinear quad at full density (modulus E0 and
// thickness baked in). Identical for every element of a uniform grid.
struct ElementStiffness {
    Eigen::Matrix<double, 8, 8> k0;
};

// The four Gauss points of the 2x2 rule on [-1,1]^2, all weights 1.
// Exact for the bilinear-quad stiffness integrand.
std::array<std::array<double, 2>, 4> gauss_points_2x2();

// Plane-stress elasticity matrix for modulus E and Poisson ratio nu.
Eigen::Matrix3d plane_stress_elasticity(double E, double nu);

// Strain-displacement matrix of the rectangular bilinear quad at natural
// coordinates (xi, eta); node order counterclockwise from bottom-left,
// dof order (u1x, u1y, ..., u4x, u4y).
Eigen::Matrix<double, 3, 8> strain_displacement(double xi, double eta,
                                                double elem_w, double elem_h);

// detJ of the rectangle map [-1,1]^2 -> elem_w x elem_h.
inline double jacobian_det(const StructuredGrid& grid) {
    return grid.elem_w * grid.elem_h / 4.0;
}

// Plane-stress bilinear-quad stiffness, 2x2 Gauss quadrature, scaled by
// thickness. Requires E0 > 0 and 0 <= nu < 0.5.
ElementStiffness element_stiffness(double E0, double nu, const StructuredGrid& grid);

}  // namespace topopt
