#include "topopt/assembly.hpp"

#include <Eigen/SparseCholesky>

#include <vector>

#include "topopt/kernels.hpp"

namespace topopt {

SparseMatrix assemble(const StructuredGrid& grid, const ElementStiffness& k0,
                      const DesignField& rho, double p) {
    const int n = grid.num_elements();
    if (rho.size() != n) throw ParameterError("assemble: density count mismatch");
    for (int e = 0; e < n; ++e) {
        if (rho.rho[e] < rho.rho_min || rho.rho[e] <= 0.0)
            throw ParameterError("assemble: density below rho_min at element " +
                                 std::to_string(e));
    }

    Eigen::VectorXd factors;
    kernels::simp_factors(rho.rho, p, factors);
    Eigen::VectorXd values;
    kernels::assembly_values(k0, factors, values);

    // Triplets in fixed element order; setFromTriplets sums duplicates in
    // a scheduling-independent order.
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(64) * static_cast<size_t>(n));
    for (int e = 0; e < n; ++e) {
        const auto dofs = grid.element_dofs(e);
        const double* slot = values.data() + 64 * static_cast<std::ptrdiff_t>(e);
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b)
                triplets.emplace_back(dofs[a], dofs[b], slot[8 * a + b]);
    }

    SparseMatrix K(grid.num_dofs(), grid.num_dofs());
    K.setFromTriplets(triplets.begin(), triplets.end());
    return K;
}

Displacements solve_equilibrium(const SparseMatrix& K, const BoundaryConditions& bc) {
    const int n = static_cast<int>(K.rows());
    if (n != bc.num_dofs()) throw ParameterError("solve_equilibrium: size mismatch");

    // Map full dofs to reduced ones (fixed dofs eliminated).
    std::vector<int> reduced_index(static_cast<size_t>(n), -1);
    int n_red = 0;
    for (int i = 0; i < n; ++i)
        if (!bc.is_fixed(i)) reduced_index[static_cast<size_t>(i)] = n_red++;
    if (n_red == 0) throw ParameterError("solve_equilibrium: all dofs fixed");

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<size_t>(K.nonZeros()));
    for (int col = 0; col < K.outerSize(); ++col) {
        const int jc = reduced_index[static_cast<size_t>(col)];
        if (jc < 0) continue;
        for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
            const int ir = reduced_index[static_cast<size_t>(it.row())];
            if (ir >= 0) triplets.emplace_back(ir, jc, it.value());
        }
    }
    SparseMatrix K_red(n_red, n_red);
    K_red.setFromTriplets(triplets.begin(), triplets.end());

    const Eigen::VectorXd p_full = bc.load_vector();
    Eigen::VectorXd p_red(n_red);
    for (int i = 0; i < n; ++i) {
        const int ir = reduced_index[static_cast<size_t>(i)];
        if (ir >= 0) p_red[ir] = p_full[i];
    }

    Eigen::SimplicialLDLT<SparseMatrix> solver(K_red);
    if (solver.info() != Eigen::Success)
        throw SolveError("solve_equilibrium: factorization failed (reduced system singular?)");
    const Eigen::VectorXd diag = solver.vectorD();
    for (int i = 0; i < diag.size(); ++i) {
        if (!(diag[i] > 0.0))
            throw SolveError("solve_equilibrium: reduced system not positive definite, "
                             "first non-positive pivot d[" + std::to_string(i) + "] = " +
                             std::to_string(diag[i]));
    }

    const Eigen::VectorXd u_red = solver.solve(p_red);
    const double p_norm = p_red.norm();
    const double residual = (K_red * u_red - p_red).norm();
    if (p_norm > 0.0 && residual > 1e-10 * p_norm)
        throw SolveError("solve_equilibrium: residual " + std::to_string(residual) +
                         " exceeds 1e-10 * ||p|| = " + std::to_string(1e-10 * p_norm));

    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        const int ir = reduced_index[static_cast<size_t>(i)];
        if (ir >= 0) u[i] = u_red[ir];
    }
    return Displacements{std::move(u)};
}

}  // namespace topopt
