#include "topopt/simp.hpp"

#include <cmath>

#include "topopt/kernels.hpp"

namespace topopt {

double effective_modulus(double rho_e, double rho_min, const SimpMaterial& mat) {
    mat.validate();
    if (rho_e < rho_min || rho_e > 1.0)
        throw ParameterError("effective_modulus: density " + std::to_string(rho_e) +
                             " outside [" + std::to_string(rho_min) + ", 1]");
    return std::pow(rho_e, mat.p) * mat.E0;
}

double compliance(const Displacements& u, const SparseMatrix& K) {
    if (u.u.size() != K.rows()) throw ParameterError("compliance: size mismatch");
    return u.u.dot(K * u.u);
}

Eigen::VectorXd element_strain_energies(const StructuredGrid& grid, const ElementStiffness& k0,
                                        const Displacements& u) {
    Eigen::VectorXd energies;
    kernels::element_energies(grid, k0, u.u, energies);
    return energies;
}

Eigen::VectorXd compliance_gradient(const Displacements& u, const DesignField& field,
                                    const SimpMaterial& mat, const StructuredGrid& grid,
                                    const ElementStiffness& k0) {
    const Eigen::VectorXd energies = element_strain_energies(grid, k0, u);
    Eigen::VectorXd grad(field.size());
    for (int e = 0; e < field.size(); ++e) {
        const double rho = field.rho[e];
        grad[e] = -(mat.p / rho) * std::pow(rho, mat.p) * energies[e];
    }
    return grad;
}

double fd_compliance_derivative(const StructuredGrid& grid, const BoundaryConditions& bc,
                                const SimpMaterial& mat, const ElementStiffness& k0,
                                const DesignField& field, int elem, double step) {
    if (elem < 0 || elem >= field.size())
        throw ParameterError("fd_compliance_derivative: element out of range");
    if (step <= 0.0) throw ParameterError("fd_compliance_derivative: step must be > 0");
    if (field.rho[elem] - step < field.rho_min || field.rho[elem] + step > 1.0)
        throw ParameterError("fd_compliance_derivative: rho +- step leaves the bounds");

    const auto evaluate = [&](double rho_e) {
        DesignField perturbed = field;
        perturbed.rho[elem] = rho_e;
        const SparseMatrix K = assemble(grid, k0, perturbed, mat.p);
        const Displacements u = solve_equilibrium(K, bc);
        return compliance(u, K);
    };

    const double f_plus = evaluate(field.rho[elem] + step);
    const double f_minus = evaluate(field.rho[elem] - step);
    return (f_plus - f_minus) / (2.0 * step);
}

}  // namespace topopt
