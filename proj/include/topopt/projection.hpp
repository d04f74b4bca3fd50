#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <vector>

#include "topopt/design.hpp"

namespace topopt {

// Constraints active at the current design point. The volume constraint
// is an equality and is always active; bound entries list the elements
// sitting exactly at rho_min or 1.
struct ActiveSet {
    bool volume_active = true;
    std::vector<int> lower_active;  // sorted, unique
    std::vector<int> upper_active;  // sorted, unique; disjoint from lower

    // 0 = free, 1 = lower bound active, 2 = upper bound active.
    std::vector<std::uint8_t> element_mask(int n) const;
    void validate(const DesignField& field) const;
};

// Hestenes multipliers: defined at every design point by orthogonality of
// the projected gradient to the active-constraint gradients, not only at
// the optimum.
struct MultiplierSet {
    double lambda_volume = 0.0;
    std::map<int, double> lambda_bounds;  // element id -> bound multiplier
};

// Direction d = -grad f + sum_k lambda_k grad h_k. Orthogonal to every
// active-constraint gradient; components at active bounds are exactly zero.
struct ProjectedDirection {
    Eigen::VectorXd d;
};

// --- generic dense instances (H holds one active-constraint gradient per row) ---

// lambda = (H H^T)^-1 (H grad_f) via the normal equations.
// Rank-deficient H raises DegeneracyError naming the dependent rows.
Eigen::VectorXd hestenes_multipliers(const Eigen::VectorXd& grad_f, const Eigen::MatrixXd& H);

// Minimizer of 1/2 || -grad_f + H^T lambda ||^2, computed through a QR
// factorization of H^T. Same normal equations as hestenes_multipliers, so
// the two must coincide on every full-rank input.
Eigen::VectorXd least_squares_multipliers(const Eigen::VectorXd& grad_f, const Eigen::MatrixXd& H);

// d = -grad_f + H^T lambda.
Eigen::VectorXd projected_gradient(const Eigen::VectorXd& grad_f, const Eigen::MatrixXd& H,
                                   const Eigen::VectorXd& lambda);

// || d ||_inf; the design point is optimal when this vanishes.
double kkt_residual(const Eigen::VectorXd& d);

// Randomized check of the uniqueness argument: random vectors are projected
// onto the tangent space of the active constraints and orthogonalized
// against d; returns max |grad_f . r| / (||grad_f|| ||r||), which is zero
// up to round-off. Vectors with norm < 1e-14 are skipped and resampled.
double tangent_uniqueness_probe(const Eigen::VectorXd& grad_f, const Eigen::MatrixXd& H,
                                const Eigen::VectorXd& d, int trials = 100,
                                std::uint64_t seed = 0);

// Venkayya's generalized-OC multiplier system, in the two published forms
// (they assemble the same equations two ways) plus the design-space-scaled
// KKT variant whose residual weighted_orthogonality_residual measures.
enum class VenkayyaForm {
    expanded,   // (E^T A E) lambda = E^T A 1 with E_ik = h_k,i / f_i, A = diag(f_i x_i)
    compact,    // (H diag(x)) (H diag(1/f))^T lambda = H x
    scaled_kkt  // (H diag(x) H^T) lambda = H (x o f)
};

Eigen::VectorXd venkayya_multipliers(const Eigen::VectorXd& grad_f, const Eigen::MatrixXd& H,
                                     const Eigen::VectorXd& x,
                                     VenkayyaForm form = VenkayyaForm::expanded);

// || H (x o (-grad_f + H^T lambda)) ||_inf. Zero for multipliers solving
// the scaled_kkt system; with uniform x it reduces to the plain
// orthogonality residual of the Hestenes system.
double weighted_orthogonality_residual(const Eigen::VectorXd& grad_f, const Eigen::MatrixXd& H,
                                       const Eigen::VectorXd& x, const Eigen::VectorXd& lambda);

// --- structured path for the topology problem (volume + disjoint bounds) ---

// Constant gradient of the linear volume constraint: the element volumes.
Eigen::VectorXd volume_constraint_gradient(const DesignField& field);

// Multipliers and projected direction for a known active set, using the
// closed form: bound rows eliminate to d_e = 0, leaving a scalar equation
// for lambda_volume over the free elements. O(N), and identical to the
// dense route on the same H.
struct ProjectionState {
    ActiveSet active_set;
    MultiplierSet multipliers;
    ProjectedDirection direction;
};

ProjectionState project_on_active_set(const DesignField& field, const Eigen::VectorXd& grad_f,
                                      const ActiveSet& active_set);

// Active-set fixed point: starting from bound contacts, a bound is added
// when the density sits at the bound and the unconstrained direction
// component would exit the box, and dropped when the direction pulls the
// density back inside. Each constraint toggles at most once per call, so
// the loop terminates; an oscillation past that budget is an internal error.
ProjectionState active_set_update(const DesignField& field, const Eigen::VectorXd& grad_f);

// Dense H whose rows are the active-constraint gradients in the fixed
// order: volume row first, then lower bounds (-e_i, ascending element id),
// then upper bounds (+e_i, ascending). Test/verification surface for the
// structured path.
Eigen::MatrixXd active_constraint_matrix(const DesignField& field, const ActiveSet& aset);

// Multipliers of `state` flattened in active_constraint_matrix row order.
Eigen::VectorXd multiplier_vector(const ProjectionState& state);

}  // namespace topopt
