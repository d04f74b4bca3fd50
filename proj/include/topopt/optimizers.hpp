#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "topopt/design.hpp"
#include "topopt/problems.hpp"
#include "topopt/projection.hpp"

namespace topopt {

// Classical optimality-criteria update parameters, including the outer
// stopping rule.
struct OcConfig {
    double move_limit = 0.2;    // zeta
    double damping = 1.0;       // eta exponent on B_e; 1 = literal update rule
    double inner_tol = 1e-6;    // |volume - V| <= inner_tol * V after the lambda search
    double lambda_lo = 1e-6;    // initial search bracket
    double lambda_hi = 1e6;
    double tol = 1e-3;          // stop on max density change <= tol, or on
                                // ||d||_inf <= tol * ||grad f||_inf
    int max_iters = 300;

    void validate() const;
};

enum class PgMode { additive, multiplicative };

// Projected-gradient step parameters. The step is additionally capped per
// outer iteration so no free density moves by more than move_limit * rho_e,
// giving the move limit the same role it has in the OC update.
struct PgConfig {
    double step = 1.0;          // gamma
    PgMode mode = PgMode::additive;
    double tol = 1e-2;          // stop on ||d||_inf <= tol * ||grad f||_inf
    int max_iters = 300;
    double move_limit = 0.2;

    void validate() const;
};

struct IterationRow {
    int iter = 0;
    double compliance = 0.0;
    double volume = 0.0;
    double kkt_residual_inf = 0.0;
    double max_density_change = 0.0;
    double lambda_volume = 0.0;
};

using ConvergenceRecord = std::vector<IterationRow>;

// The OC optimality ratio B_e = (-f,rho_e) / lambda; rejects lambda <= 0.
Eigen::VectorXd compute_Be(const Eigen::VectorXd& energy_density_gradient, double lambda);

// Fixed-point density update with move limits:
// clip(rho_e Be^eta into [max((1-zeta) rho_e, rho_min), min((1+zeta) rho_e, 1)]).
DesignField oc_update(const DesignField& field, const Eigen::VectorXd& Be, const OcConfig& cfg);

struct OcStepResult {
    double lambda = 0.0;
    DesignField field;
    bool volume_attained = true;  // false: bounds/move limits blocked the target
};

// Bisection for the volume multiplier: the achieved volume is monotone
// non-increasing in lambda, so a bracketed search always converges. The
// initial bracket is widened by factors of 10, up to 60 times per side.
OcStepResult oc_lambda_search(const DesignField& field, const Eigen::VectorXd& neg_gradient,
                              const OcConfig& cfg);

// rho + gamma d with each element's move capped at move_limit * rho_e,
// box-clipped, then volume restored.
DesignField pg_step_additive(const DesignField& field, const ProjectionState& proj,
                             const PgConfig& cfg);

// Multiplicative resize rho_e * ratio^gamma on free elements (active-bound
// elements frozen), box-clipped, then volume restored. The ratio compares
// f,rho_e against the multiplier-weighted constraint gradient and is 1
// exactly at interior KKT points, so those are fixed points; it is
// oriented so the resize descends (the B_e sense of the OC update).
DesignField pg_step_multiplicative(const DesignField& field, const Eigen::VectorXd& grad_f,
                                   const ProjectionState& proj, const PgConfig& cfg);

// Multiplicative rescale of non-frozen densities toward the volume target,
// re-clipping to the box; bisection on the scale factor. Raises
// FeasibilityError when saturation makes the target unreachable.
DesignField volume_restore(const DesignField& field,
                           const std::vector<std::uint8_t>& frozen = {});

enum class OptimizerChoice { oc, pg };

// Snapshot handed to the iteration observer: the evaluated state of the
// current iterate, before the update is applied.
struct IterationState {
    int iter;
    const DesignField& field;
    const Eigen::VectorXd& grad_f;
    const ProjectionState& projection;
    double compliance;
    double volume;
};

using IterationObserver = std::function<void(const IterationState&)>;

struct RunResult {
    DesignField field;
    ConvergenceRecord record;
    bool converged = false;
    int iterations = 0;
    double final_compliance = 0.0;
    double oc_lambda = 0.0;             // last inner-loop multiplier (OC runs)
    double final_reduced_energy = 0.0;  // tension runs: sum of reduced Gauss energies
};

// Outer iteration driver: solve -> gradient -> (OC: lambda search + update |
// PG: active set + multipliers + projected step), recording one row per
// iteration. Deterministic for identical inputs. When the problem carries a
// TensionConfig the reduced-stress descent direction replaces the standard
// gradient, feeding the same projection and update machinery.
RunResult run_optimization(const ProblemDefinition& problem, OptimizerChoice choice,
                           const OcConfig& oc_cfg, const PgConfig& pg_cfg,
                           const IterationObserver& observer = {});

}  // namespace topopt
