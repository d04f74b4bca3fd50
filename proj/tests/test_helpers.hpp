#pragma once

#include <Eigen/Dense>

#include <random>

#include "topopt/assembly.hpp"
#include "topopt/design.hpp"
#include "topopt/element.hpp"
#include "topopt/grid.hpp"

namespace topopt::testing {

// Uniform design field over a grid; volume target matches the densities.
inline DesignField make_field(const StructuredGrid& grid, double rho, double rho_min = 1e-3) {
    DesignField field;
    const int n = grid.num_elements();
    field.rho = Eigen::VectorXd::Constant(n, rho);
    field.rho_min = rho_min;
    field.elem_volumes = Eigen::VectorXd::Constant(n, grid.element_volume());
    field.volume_target = field.rho.dot(field.elem_volumes);
    return field;
}

// Cantilever boundary conditions built by hand (independent of the
// problems module): left edge fully fixed, downward tip load at the
// right-edge midheight node.
inline BoundaryConditions cantilever_bc(const StructuredGrid& grid, double load = -1.0) {
    std::vector<int> fixed;
    for (int j = 0; j <= grid.ny; ++j) {
        fixed.push_back(2 * grid.node_index(0, j));
        fixed.push_back(2 * grid.node_index(0, j) + 1);
    }
    std::vector<PointLoad> loads{{2 * grid.node_index(grid.nx, grid.ny / 2) + 1, load}};
    return BoundaryConditions(grid, std::move(fixed), std::move(loads));
}

// Dense oracle: scatter-assemble K from k0 with plain loops, eliminate the
// fixed dofs and solve with a dense factorization. Deliberately separate
// from the sparse production path.
inline Eigen::VectorXd dense_solve_oracle(const StructuredGrid& grid, const ElementStiffness& k0,
                                          const DesignField& field, double p,
                                          const BoundaryConditions& bc) {
    const int ndof = grid.num_dofs();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(ndof, ndof);
    for (int e = 0; e < grid.num_elements(); ++e) {
        const double factor = std::pow(field.rho[e], p);
        const auto dofs = grid.element_dofs(e);
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) K(dofs[a], dofs[b]) += factor * k0.k0(a, b);
    }
    std::vector<int> free_dofs;
    for (int i = 0; i < ndof; ++i)
        if (!bc.is_fixed(i)) free_dofs.push_back(i);
    const int nf = static_cast<int>(free_dofs.size());
    Eigen::MatrixXd K_red(nf, nf);
    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < nf; ++b) K_red(a, b) = K(free_dofs[a], free_dofs[b]);
    const Eigen::VectorXd p_full = bc.load_vector();
    Eigen::VectorXd p_red(nf);
    for (int a = 0; a < nf; ++a) p_red[a] = p_full[free_dofs[a]];
    const Eigen::VectorXd u_red = K_red.ldlt().solve(p_red);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(ndof);
    for (int a = 0; a < nf; ++a) u[free_dofs[a]] = u_red[a];
    return u;
}

// Seeded full-row-rank random instance (entries in [-1, 1], resampled
// until the smallest singular value clears a conditioning floor).
inline void random_instance(std::mt19937_64& rng, int n, int s, Eigen::VectorXd& grad_f,
                            Eigen::MatrixXd& H) {
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    grad_f.resize(n);
    for (int i = 0; i < n; ++i) grad_f[i] = uniform(rng);
    H.resize(s, n);
    for (;;) {
        for (int k = 0; k < s; ++k)
            for (int i = 0; i < n; ++i) H(k, i) = uniform(rng);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
        if (svd.singularValues().minCoeff() > 0.2) return;
    }
}

}  // namespace topopt::testing
