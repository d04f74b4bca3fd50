#include "topopt/stress.hpp"

namespace topopt {

ElementGaussStresses gauss_point_stresses(const StructuredGrid& grid, int elem,
                                          const Displacements& u, double E, double nu) {
    if (elem < 0 || elem >= grid.num_elements())
        throw ParameterError("gauss_point_stresses: element " + std::to_string(elem) +
                             " out of range");
    if (E <= 0.0) throw ParameterError("gauss_point_stresses: E must be > 0");
    if (u.u.size() != grid.num_dofs())
        throw ParameterError("gauss_point_stresses: displacement size mismatch");

    const auto dofs = grid.element_dofs(elem);
    Eigen::Matrix<double, 8, 1> ue;
    for (int a = 0; a < 8; ++a) ue[a] = u.u[dofs[a]];

    const Eigen::Matrix3d C = plane_stress_elasticity(E, nu);
    ElementGaussStresses out;
    int g = 0;
    for (const auto& [xi, eta] : gauss_points_2x2()) {
        const Eigen::Vector3d s = C * (strain_displacement(xi, eta, grid.elem_w, grid.elem_h) * ue);
        out[g++] = StressTensor2D{s[0], s[1], s[2]};
    }
    return out;
}

double stress_energy_density(const StressTensor2D& s, double E, double nu) {
    return (s.sxx * s.sxx - 2.0 * nu * s.sxx * s.syy + s.syy * s.syy +
            2.0 * (1.0 + nu) * s.txy * s.txy) / E;
}

double stress_form_energy(const StructuredGrid& grid, const ElementGaussStresses& stresses,
                          double E, double nu) {
    const double w = jacobian_det(grid) * grid.thickness;
    double acc = 0.0;
    for (const auto& s : stresses) acc += stress_energy_density(s, E, nu) * w;
    return acc;
}

}  // namespace topopt
