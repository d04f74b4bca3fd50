#include "topopt/optimizers.hpp"

#include <algorithm>
#include <cmath>

#include "topopt/assembly.hpp"
#include "topopt/kernels.hpp"
#include "topopt/simp.hpp"
#include "topopt/tension.hpp"

namespace topopt {

void OcConfig::validate() const {
    if (move_limit <= 0.0 || move_limit >= 1.0)
        throw ParameterError("oc: move limit must be in (0, 1)");
    if (damping <= 0.0 || damping > 1.0)
        throw ParameterError("oc: damping exponent must be in (0, 1]");
    if (inner_tol <= 0.0) throw ParameterError("oc: inner_tol must be > 0");
    if (!(lambda_lo > 0.0) || lambda_lo >= lambda_hi)
        throw ParameterError("oc: lambda bracket must satisfy 0 < lo < hi");
    if (tol <= 0.0) throw ParameterError("oc: tol must be > 0");
    if (max_iters < 0) throw ParameterError("oc: max_iters must be >= 0");
}

void PgConfig::validate() const {
    if (step <= 0.0) throw ParameterError("pg: step must be > 0");
    if (tol <= 0.0) throw ParameterError("pg: tol must be > 0");
    if (max_iters < 0) throw ParameterError("pg: max_iters must be >= 0");
    if (move_limit <= 0.0 || move_limit >= 1.0)
        throw ParameterError("pg: move limit must be in (0, 1)");
}

Eigen::VectorXd compute_Be(const Eigen::VectorXd& energy_density_gradient, double lambda) {
    if (!(lambda > 0.0))
        throw ParameterError("compute_Be: lambda must be > 0, got " + std::to_string(lambda));
    return energy_density_gradient / lambda;
}

DesignField oc_update(const DesignField& field, const Eigen::VectorXd& Be, const OcConfig& cfg) {
    cfg.validate();
    if (Be.size() != field.size()) throw ParameterError("oc_update: Be size mismatch");
    if ((Be.array() < 0.0).any()) throw ParameterError("oc_update: Be must be >= 0");
    DesignField out = field;
    kernels::oc_candidates(field.rho, Be, cfg.damping, cfg.move_limit, field.rho_min, out.rho);
    return out;
}

OcStepResult oc_lambda_search(const DesignField& field, const Eigen::VectorXd& neg_gradient,
                              const OcConfig& cfg) {
    cfg.validate();
    if (neg_gradient.size() != field.size())
        throw ParameterError("oc_lambda_search: gradient size mismatch");
    if ((neg_gradient.array() < 0.0).any())
        throw ParameterError("oc_lambda_search: energy gradient must be >= 0");

    const double V = field.volume_target;
    const Eigen::VectorXd& v = field.elem_volumes;
    Eigen::VectorXd candidate(field.size());
    const auto volume_at = [&](double lambda) {
        kernels::oc_candidates(field.rho, neg_gradient / lambda, cfg.damping, cfg.move_limit,
                               field.rho_min, candidate);
        return candidate.dot(v);
    };

    // The achieved volume is non-increasing in lambda: widen the bracket
    // until it encloses the target.
    double lo = cfg.lambda_lo;
    double hi = cfg.lambda_hi;
    int expansions = 0;
    while (volume_at(lo) < V && expansions < 60) {
        lo /= 10.0;
        ++expansions;
    }
    expansions = 0;
    while (volume_at(hi) > V && expansions < 60) {
        hi *= 10.0;
        ++expansions;
    }

    OcStepResult result;
    if (volume_at(lo) < V) {  // move limits cap the attainable volume from above
        result.lambda = lo;
        result.volume_attained = false;
    } else if (volume_at(hi) > V) {
        result.lambda = hi;
        result.volume_attained = false;
    } else {
        double mid = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            mid = 0.5 * (lo + hi);
            const double vol = volume_at(mid);
            if (std::abs(vol - V) <= cfg.inner_tol * V) break;
            if (vol > V)
                lo = mid;
            else
                hi = mid;
        }
        result.lambda = mid;
        result.volume_attained = std::abs(volume_at(mid) - V) <= cfg.inner_tol * V;
        if (!result.volume_attained)
            throw FeasibilityError("oc_lambda_search: bisection failed to meet the volume "
                                   "tolerance (bracket [" + std::to_string(lo) + ", " +
                                   std::to_string(hi) + "])");
    }
    result.field = field;
    kernels::oc_candidates(field.rho, neg_gradient / result.lambda, cfg.damping, cfg.move_limit,
                           field.rho_min, result.field.rho);
    return result;
}

DesignField volume_restore(const DesignField& field, const std::vector<std::uint8_t>& frozen) {
    const double V = field.volume_target;
    if (!(V > 0.0)) throw ParameterError("volume_restore: volume target must be > 0");
    const Eigen::VectorXd& v = field.elem_volumes;
    const double tol = 1e-9 * V;

    if (std::abs(field.volume() - V) <= tol) return field;

    Eigen::VectorXd candidate(field.size());
    const auto volume_at = [&](double s) {
        kernels::scale_clip_candidates(field.rho, s, field.rho_min, frozen, candidate);
        return candidate.dot(v);
    };

    // clip(s * rho) makes the volume continuous and non-decreasing in s;
    // this bracket spans the full range from all-free-at-rho_min to
    // all-free-at-1.
    double lo = field.rho_min;
    double hi = 1.0 / field.rho_min;
    if (volume_at(lo) > V + tol)
        throw FeasibilityError("volume_restore: volume above target with every free density "
                               "at rho_min (frozen set too large?)");
    if (volume_at(hi) < V - tol)
        throw FeasibilityError("volume_restore: volume below target with every free density "
                               "saturated at 1");

    double mid = 1.0;
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double vol = volume_at(mid);
        if (std::abs(vol - V) <= tol) break;
        if (vol < V)
            lo = mid;
        else
            hi = mid;
    }
    if (std::abs(volume_at(mid) - V) > tol)
        throw FeasibilityError("volume_restore: bisection failed to reach the volume target");

    DesignField out = field;
    kernels::scale_clip_candidates(field.rho, mid, field.rho_min, frozen, out.rho);
    return out;
}

DesignField pg_step_additive(const DesignField& field, const ProjectionState& proj,
                             const PgConfig& cfg) {
    cfg.validate();
    const Eigen::VectorXd& d = proj.direction.d;
    if (d.size() != field.size()) throw ParameterError("pg_step_additive: size mismatch");
    const auto mask = proj.active_set.element_mask(field.size());

    // gamma d, with each element's move capped at move_limit * rho_e (the
    // same role the move limit plays in the OC update), then box clip.
    DesignField out = field;
    kernels::additive_candidates(field.rho, d, cfg.step, cfg.move_limit, field.rho_min,
                                 out.rho);
    return volume_restore(out, mask);
}

DesignField pg_step_multiplicative(const DesignField& field, const Eigen::VectorXd& grad_f,
                                   const ProjectionState& proj, const PgConfig& cfg) {
    cfg.validate();
    if (grad_f.size() != field.size())
        throw ParameterError("pg_step_multiplicative: gradient size mismatch");
    const auto mask = proj.active_set.element_mask(field.size());
    const double lambda_volume = proj.multipliers.lambda_volume;
    const Eigen::VectorXd& v = field.elem_volumes;

    DesignField out = field;
    for (int e = 0; e < field.size(); ++e) {
        if (mask[static_cast<size_t>(e)]) continue;  // active bounds: density frozen
        if (grad_f[e] == 0.0)
            throw ScalingError("pg_step_multiplicative: zero gradient component at element " +
                               std::to_string(e));
        // descent orientation of the resize ratio: f,rho_e over the
        // multiplier-weighted constraint gradient. Equals 1 exactly at
        // interior KKT points; above 1 where the element is more energetic
        // than the free-set mean (the B_e-type ratio of the OC update).
        const double ratio = grad_f[e] / (lambda_volume * v[e]);
        if (!(ratio > 0.0))
            throw ScalingError("pg_step_multiplicative: non-positive update ratio at element " +
                               std::to_string(e));
        out.rho[e] = std::clamp(field.rho[e] * std::pow(ratio, cfg.step), field.rho_min, 1.0);
    }
    return volume_restore(out, mask);
}

namespace {

struct Evaluation {
    double compliance = 0.0;
    Eigen::VectorXd grad;
    double reduced_energy = 0.0;
};

// Average each mirror pair of sensitivities. For a problem that is
// symmetric about its vertical midline the two values agree in exact
// arithmetic; averaging removes the round-off residue that the rho^p
// feedback would otherwise amplify into an asymmetric design.
void symmetrize_mirror_pairs(const StructuredGrid& grid, Eigen::VectorXd& per_element) {
    for (int i = 0; i < grid.nx / 2; ++i) {
        for (int j = 0; j < grid.ny; ++j) {
            const int left = grid.element_index(i, j);
            const int right = grid.element_index(grid.nx - 1 - i, j);
            const double mean = 0.5 * (per_element[left] + per_element[right]);
            per_element[left] = mean;
            per_element[right] = mean;
        }
    }
}

Evaluation evaluate_design(const ProblemDefinition& problem, const BoundaryConditions& bc,
                           const ElementStiffness& k0, const DesignField& field) {
    const SimpMaterial& mat = problem.material;
    const SparseMatrix K = assemble(problem.grid, k0, field, mat.p);
    const Displacements u = solve_equilibrium(K, bc);

    Evaluation ev;
    ev.compliance = compliance(u, K);
    if (problem.tension) {
        Eigen::VectorXd E_eff(field.size());
        for (int e = 0; e < field.size(); ++e)
            E_eff[e] = std::pow(field.rho[e], mat.p) * mat.E0;
        std::vector<ElementGaussStresses> stresses;
        kernels::gauss_stress_sweep(problem.grid, u.u, E_eff, mat.nu, stresses);
        const double detj_t = jacobian_det(problem.grid) * problem.grid.thickness;
        const Eigen::VectorXd tension = tension_gradient(field, mat, stresses, detj_t,
                                                         *problem.tension);
        ev.grad = -tension;
        // reduced Gauss-point energy: the tension value is (p/rho) times it
        ev.reduced_energy = (tension.array() * field.rho.array()).sum() / mat.p;
    } else {
        ev.grad = compliance_gradient(u, field, mat, problem.grid, k0);
    }
    if (problem.mirror_symmetric) symmetrize_mirror_pairs(problem.grid, ev.grad);
    return ev;
}

}  // namespace

RunResult run_optimization(const ProblemDefinition& problem, OptimizerChoice choice,
                           const OcConfig& oc_cfg, const PgConfig& pg_cfg,
                           const IterationObserver& observer) {
    problem.validate();
    oc_cfg.validate();
    pg_cfg.validate();
    const BoundaryConditions bc = problem.boundary_conditions();
    const ElementStiffness k0 =
        element_stiffness(problem.material.E0, problem.material.nu, problem.grid);

    RunResult result;
    DesignField field = problem.initial_field();
    const int max_iters = (choice == OptimizerChoice::oc) ? oc_cfg.max_iters : pg_cfg.max_iters;

    for (int iter = 1; iter <= max_iters; ++iter) {
        const Evaluation ev = evaluate_design(problem, bc, k0, field);
        const ProjectionState proj = active_set_update(field, ev.grad);
        const double kkt = kkt_residual(proj.direction.d);
        const double grad_norm = ev.grad.lpNorm<Eigen::Infinity>();
        const double volume = field.volume();

        if (observer)
            observer(IterationState{iter, field, ev.grad, proj, ev.compliance, volume});

        IterationRow row;
        row.iter = iter;
        row.compliance = ev.compliance;
        row.volume = volume;
        row.kkt_residual_inf = kkt;
        row.lambda_volume = proj.multipliers.lambda_volume;

        result.iterations = iter;
        if (choice == OptimizerChoice::pg) {
            if (kkt <= pg_cfg.tol * grad_norm) {
                result.record.push_back(row);
                result.converged = true;
                break;
            }
            DesignField next = (pg_cfg.mode == PgMode::additive)
                                   ? pg_step_additive(field, proj, pg_cfg)
                                   : pg_step_multiplicative(field, ev.grad, proj, pg_cfg);
            row.max_density_change = (next.rho - field.rho).lpNorm<Eigen::Infinity>();
            result.record.push_back(row);
            field = std::move(next);
        } else {
            const OcStepResult step = oc_lambda_search(field, -ev.grad, oc_cfg);
            row.max_density_change = (step.field.rho - field.rho).lpNorm<Eigen::Infinity>();
            result.record.push_back(row);
            result.oc_lambda = step.lambda;
            field = step.field;
            if (row.max_density_change <= oc_cfg.tol || kkt <= oc_cfg.tol * grad_norm) {
                result.converged = true;
                break;
            }
        }
    }

    const Evaluation final_ev = evaluate_design(problem, bc, k0, field);
    result.field = std::move(field);
    result.final_compliance = final_ev.compliance;
    result.final_reduced_energy = final_ev.reduced_energy;
    return result;
}

}  // namespace topopt
