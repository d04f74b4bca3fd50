#include "topopt/element.hpp"

#include <cmath>

namespace topopt {

std::array<std::array<double, 2>, 4> gauss_points_2x2() {
    const double g = 1.0 / std::sqrt(3.0);
    return {{{-g, -g}, {g, -g}, {g, g}, {-g, g}}};
}

Eigen::Matrix3d plane_stress_elasticity(double E, double nu) {
    Eigen::Matrix3d C;
    const double c = E / (1.0 - nu * nu);
    C << c, c * nu, 0.0,
         c * nu, c, 0.0,
         0.0, 0.0, c * (1.0 - nu) / 2.0;
    return C;
}

Eigen::Matrix<double, 3, 8> strain_displacement(double xi, double eta,
                                                double elem_w, double elem_h) {
    // dN/dxi, dN/deta for N_i = (1 + s_xi xi)(1 + s_eta eta)/4,
    // node order (-,-), (+,-), (+,+), (-,+).
    static constexpr double sx[4] = {-1.0, 1.0, 1.0, -1.0};
    static constexpr double se[4] = {-1.0, -1.0, 1.0, 1.0};

    Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
    for (int i = 0; i < 4; ++i) {
        const double dNdx = sx[i] * (1.0 + se[i] * eta) / 4.0 * (2.0 / elem_w);
        const double dNdy = se[i] * (1.0 + sx[i] * xi) / 4.0 * (2.0 / elem_h);
        B(0, 2 * i) = dNdx;
        B(1, 2 * i + 1) = dNdy;
        B(2, 2 * i) = dNdy;
        B(2, 2 * i + 1) = dNdx;
    }
    return B;
}

ElementStiffness element_stiffness(double E0, double nu, const StructuredGrid& grid) {
    if (E0 <= 0.0) throw ParameterError("element_stiffness: E0 must be > 0");
    if (nu < 0.0 || nu >= 0.5) throw ParameterError("element_stiffness: nu must be in [0, 0.5)");
    grid.validate();

    const Eigen::Matrix3d C = plane_stress_elasticity(E0, nu);
    const double detJ = jacobian_det(grid);

    Eigen::Matrix<double, 8, 8> k = Eigen::Matrix<double, 8, 8>::Zero();
    for (const auto& [xi, eta] : gauss_points_2x2()) {
        const auto B = strain_displacement(xi, eta, grid.elem_w, grid.elem_h);
        k += grid.thickness * detJ * (B.transpose() * C * B);
    }
    // symmetrize away the last bits of round-off from the accumulation
    k = 0.5 * (k + k.transpose()).eval();
    return ElementStiffness{k};
}

}  // namespace topopt
