#include "topopt/projection.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace topopt {

namespace {

constexpr double kBoundContactTol = 1e-12;

// Rank check through a column-pivoted QR of H^T; names the rows that are
// linear combinations of the preceding ones.
void require_full_row_rank(const Eigen::MatrixXd& H, const char* who) {
    if (H.rows() == 0) return;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(H.transpose());
    const auto rank = qr.rank();
    if (rank >= H.rows()) return;

    std::ostringstream msg;
    msg << who << ": active-constraint gradients are rank-deficient (rank " << rank << " of "
        << H.rows() << "); dependent rows:";
    const auto& perm = qr.colsPermutation().indices();
    std::vector<int> dependent;
    for (Eigen::Index i = rank; i < perm.size(); ++i)
        dependent.push_back(static_cast<int>(perm[i]));
    std::sort(dependent.begin(), dependent.end());
    for (int r : dependent) msg << ' ' << r;
    throw DegeneracyError(msg.str());
}

void check_sizes(const Eigen::VectorXd& grad_f, const Eigen::MatrixXd& H, const char* who) {
    if (H.rows() > 0 && H.cols() != grad_f.size())
        throw ParameterError(std::string(who) + ": H column count does not match grad_f");
}

}  // namespace

std::vector<std::uint8_t> ActiveSet::element_mask(int n) const {
    std::vector<std::uint8_t> mask(static_cast<size_t>(n), 0);
    for (int e : lower_active) {
        if (e < 0 || e >= n) throw ParameterError("active set: element id out of range");
        mask[static_cast<size_t>(e)] = 1;
    }
    for (int e : upper_active) {
        if (e < 0 || e >= n) throw ParameterError("active set: element id out of range");
        if (mask[static_cast<size_t>(e)])
            throw DegeneracyError("active set: element " + std::to_string(e) +
                                  " in both bound sets");
        mask[static_cast<size_t>(e)] = 2;
    }
    return mask;
}

void ActiveSet::validate(const DesignField& field) const {
    element_mask(field.size());  // range and disjointness
    for (int e : lower_active)
        if (std::abs(field.rho[e] - field.rho_min) > kBoundContactTol)
            throw ParameterError("active set: element " + std::to_string(e) +
                                 " not at the lower bound");
    for (int e : upper_active)
        if (std::abs(field.rho[e] - 1.0) > kBoundContactTol)
            throw ParameterError("active set: element " + std::to_string(e) +
                                 " not at the upper bound");
}

Eigen::VectorXd hestenes_multipliers(const Eigen::VectorXd& grad_f, const Eigen::MatrixXd& H) {
    check_sizes(grad_f, H, "hestenes_multipliers");
    if (H.rows() == 0) return Eigen::VectorXd();
    require_full_row_rank(H, "hestenes_multipliers");

    const Eigen::MatrixXd gram = H * H.transpose();
    const Eigen::VectorXd rhs = H * grad_f;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw DegeneracyError("hestenes_multipliers: H H^T not positive definite");
    return llt.solve(rhs);
}

Eigen::VectorXd least_squares_multipliers(const Eigen::VectorXd& grad_f,
                                          const Eigen::MatrixXd& H) {
    check_sizes(grad_f, H, "least_squares_multipliers");
    if (H.rows() == 0) return Eigen::VectorXd();
    require_full_row_rank(H, "least_squares_multipliers");
    // QR route: min_lambda || H^T lambda - grad_f ||_2
    return Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(H.transpose()).solve(grad_f);
}

Eigen::VectorXd projected_gradient(const Eigen::VectorXd& grad_f, const Eigen::MatrixXd& H,
                                   const Eigen::VectorXd& lambda) {
    check_sizes(grad_f, H, "projected_gradient");
    if (lambda.size() != H.rows())
        throw ParameterError("projected_gradient: multiplier count does not match H");
    Eigen::VectorXd d = -grad_f;
    if (H.rows() > 0) d += H.transpose() * lambda;
    return d;
}

double kkt_residual(const Eigen::VectorXd& d) {
    return d.size() == 0 ? 0.0 : d.lpNorm<Eigen::Infinity>();
}

double tangent_uniqueness_probe(const Eigen::VectorXd& grad_f, const Eigen::MatrixXd& H,
                                const Eigen::VectorXd& d, int trials, std::uint64_t seed) {
    check_sizes(grad_f, H, "tangent_uniqueness_probe");
    if (trials < 1) throw ParameterError("tangent_uniqueness_probe: trials must be >= 1");
    const Eigen::Index n = grad_f.size();

    Eigen::Index rank = 0;
    Eigen::LLT<Eigen::MatrixXd> gram_llt;
    if (H.rows() > 0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(H.transpose());
        rank = qr.rank();
        gram_llt.compute(H * H.transpose());
        if (gram_llt.info() != Eigen::Success)
            throw DegeneracyError("tangent_uniqueness_probe: H H^T not positive definite");
    }
    const bool d_nonzero = d.size() > 0 && d.norm() > 1e-14;
    // No r exists: the tangent space is exhausted by d itself.
    if (n - rank - (d_nonzero ? 1 : 0) <= 0) return 0.0;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double grad_norm = grad_f.norm();
    if (grad_norm == 0.0) return 0.0;

    double worst = 0.0;
    int accepted = 0;
    int attempts = 0;
    const int max_attempts = 100 * trials;
    while (accepted < trials && attempts < max_attempts) {
        ++attempts;
        Eigen::VectorXd r(n);
        for (Eigen::Index i = 0; i < n; ++i) r[i] = normal(rng);
        if (H.rows() > 0) r -= H.transpose() * gram_llt.solve(H * r);
        if (d_nonzero) r -= (r.dot(d) / d.squaredNorm()) * d;
        const double r_norm = r.norm();
        if (r_norm < 1e-14) continue;  // degenerate sample, resample
        worst = std::max(worst, std::abs(grad_f.dot(r)) / (grad_norm * r_norm));
        ++accepted;
    }
    if (accepted < trials)
        throw InternalError("tangent_uniqueness_probe: could not sample enough tangent vectors");
    return worst;
}

Eigen::VectorXd venkayya_multipliers(const Eigen::VectorXd& grad_f, const Eigen::MatrixXd& H,
                                     const Eigen::VectorXd& x, VenkayyaForm form) {
    check_sizes(grad_f, H, "venkayya_multipliers");
    if (x.size() != grad_f.size())
        throw ParameterError("venkayya_multipliers: design vector size mismatch");
    const Eigen::Index n = grad_f.size();
    const Eigen::Index s = H.rows();
    if (s == 0) return Eigen::VectorXd();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (grad_f[i] == 0.0)
            throw ScalingError("venkayya_multipliers: zero objective-gradient component at index " +
                               std::to_string(i) + " (the scaled condition divides by it)");
        if (!(x[i] > 0.0))
            throw ScalingError("venkayya_multipliers: design variable " + std::to_string(i) +
                               " not positive");
    }
    require_full_row_rank(H, "venkayya_multipliers");

    Eigen::MatrixXd M(s, s);
    Eigen::VectorXd rhs(s);
    switch (form) {
        case VenkayyaForm::expanded: {
            // E_ik = h_k,i / f_i ; A = diag(f_i x_i); (E^T A E) lambda = E^T A 1
            Eigen::MatrixXd E(n, s);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index k = 0; k < s; ++k) E(i, k) = H(k, i) / grad_f[i];
            const Eigen::VectorXd a = grad_f.cwiseProduct(x);
            M = E.transpose() * a.asDiagonal() * E;
            rhs = E.transpose() * a;
            break;
        }
        case VenkayyaForm::compact: {
            // ((H x)(H grad_f^-1)) lambda = (H x), products read as diagonal scalings
            const Eigen::MatrixXd Hx = H * x.asDiagonal();
            const Eigen::MatrixXd Hginv = H * grad_f.cwiseInverse().asDiagonal();
            M = Hx * Hginv.transpose();
            rhs = Hx.rowwise().sum();
            break;
        }
        case VenkayyaForm::scaled_kkt: {
            // original condition (16) multiplied by the weighting matrix:
            // (H diag(x) H^T) lambda = H (x o grad_f)
            M = H * x.asDiagonal() * H.transpose();
            rhs = H * x.cwiseProduct(grad_f);
            break;
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    const Eigen::VectorXd lambda = lu.solve(rhs);
    if (!lambda.allFinite())
        throw DegeneracyError("venkayya_multipliers: weighted system singular");
    return lambda;
}

double weighted_orthogonality_residual(const Eigen::VectorXd& grad_f, const Eigen::MatrixXd& H,
                                       const Eigen::VectorXd& x, const Eigen::VectorXd& lambda) {
    check_sizes(grad_f, H, "weighted_orthogonality_residual");
    if (lambda.size() != H.rows())
        throw ParameterError("weighted_orthogonality_residual: multiplier count mismatch");
    if (x.size() != grad_f.size())
        throw ParameterError("weighted_orthogonality_residual: design vector size mismatch");
    if (H.rows() == 0) return 0.0;
    const Eigen::VectorXd scaled = x.cwiseProduct(-grad_f + H.transpose() * lambda);
    return (H * scaled).lpNorm<Eigen::Infinity>();
}

Eigen::VectorXd volume_constraint_gradient(const DesignField& field) {
    return field.elem_volumes;
}

ProjectionState project_on_active_set(const DesignField& field, const Eigen::VectorXd& grad_f,
                                      const ActiveSet& active_set) {
    if (grad_f.size() != field.size())
        throw ParameterError("project_on_active_set: gradient size mismatch");
    active_set.validate(field);
    const int n = field.size();
    const auto mask = active_set.element_mask(n);
    const Eigen::VectorXd& v = field.elem_volumes;

    // Bound rows eliminate to d_e = 0, leaving one equation for the volume
    // multiplier over the free elements.
    double sv2 = 0.0;
    double svg = 0.0;
    int free_count = 0;
    for (int e = 0; e < n; ++e) {
        if (mask[static_cast<size_t>(e)]) continue;
        sv2 += v[e] * v[e];
        svg += v[e] * grad_f[e];
        ++free_count;
    }
    if (free_count == 0)
        throw DegeneracyError("project_on_active_set: no free elements; the volume-constraint "
                              "row is dependent on the bound rows");
    const double lambda_volume = svg / sv2;

    ProjectionState state;
    state.active_set = active_set;
    state.multipliers.lambda_volume = lambda_volume;
    state.direction.d.resize(n);
    for (int e = 0; e < n; ++e) {
        const double c = -grad_f[e] + lambda_volume * v[e];
        switch (mask[static_cast<size_t>(e)]) {
            case 0:
                state.direction.d[e] = c;
                break;
            case 1:  // lower bound, grad h = -e_e
                state.direction.d[e] = 0.0;
                state.multipliers.lambda_bounds[e] = c;
                break;
            default:  // upper bound, grad h = +e_e
                state.direction.d[e] = 0.0;
                state.multipliers.lambda_bounds[e] = -c;
                break;
        }
    }
    return state;
}

ProjectionState active_set_update(const DesignField& field, const Eigen::VectorXd& grad_f) {
    if (grad_f.size() != field.size())
        throw ParameterError("active_set_update: gradient size mismatch");
    const int n = field.size();
    const Eigen::VectorXd& v = field.elem_volumes;

    // Stability of a bound depends on the sign of the unconstrained
    // component c_e = -g_e + lambda_v v_e, hence only on where lambda_v
    // falls relative to the element's breakpoint t_e = g_e / v_e:
    //   lower contact active  <=>  lambda_v < t_e   (c_e < 0, exits the box)
    //   upper contact active  <=>  lambda_v > t_e   (c_e > 0)
    // lambda_v itself is the free-set mean Sum(v g)/Sum(v^2), so the stable
    // configuration is the fixed point of a one-dimensional scan over the
    // sorted breakpoints. A consistent interval always exists: the free-set
    // mean is bounded by the extreme breakpoints and moves toward a
    // breakpoint whenever the scan crosses it.
    struct Breakpoint {
        double t;
        int elem;
        bool lower;
    };
    std::vector<Breakpoint> breakpoints;
    double svg = 0.0;  // running free-set sums for lambda below every breakpoint
    double sv2 = 0.0;
    for (int e = 0; e < n; ++e) {
        const bool at_lower = std::abs(field.rho[e] - field.rho_min) <= kBoundContactTol;
        const bool at_upper = std::abs(field.rho[e] - 1.0) <= kBoundContactTol;
        if (at_lower) {
            breakpoints.push_back({grad_f[e] / v[e], e, true});  // starts active
        } else if (at_upper) {
            breakpoints.push_back({grad_f[e] / v[e], e, false});  // starts free
            svg += v[e] * grad_f[e];
            sv2 += v[e] * v[e];
        } else {
            svg += v[e] * grad_f[e];
            sv2 += v[e] * v[e];
        }
    }
    std::sort(breakpoints.begin(), breakpoints.end(), [](const Breakpoint& a, const Breakpoint& b) {
        return a.t != b.t ? a.t < b.t : a.elem < b.elem;
    });

    const auto accept = [&](size_t crossed) {
        ActiveSet aset;
        for (size_t k = 0; k < breakpoints.size(); ++k) {
            const auto& bp = breakpoints[k];
            const bool is_crossed = k < crossed;
            // lower contacts free once crossed, upper contacts active once crossed
            if (bp.lower && !is_crossed) aset.lower_active.push_back(bp.elem);
            if (!bp.lower && is_crossed) aset.upper_active.push_back(bp.elem);
        }
        std::sort(aset.lower_active.begin(), aset.lower_active.end());
        std::sort(aset.upper_active.begin(), aset.upper_active.end());
        return project_on_active_set(field, grad_f, aset);
    };

    double lo = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k <= breakpoints.size(); ++k) {
        const double hi = (k < breakpoints.size()) ? breakpoints[k].t
                                                   : std::numeric_limits<double>::infinity();
        if (sv2 > 0.0) {
            const double lambda = svg / sv2;
            if (lambda >= lo && lambda <= hi) return accept(k);
        }
        if (k < breakpoints.size()) {
            const auto& bp = breakpoints[k];
            const double dv2 = v[bp.elem] * v[bp.elem];
            const double dvg = v[bp.elem] * grad_f[bp.elem];
            if (bp.lower) {  // becomes free above its breakpoint
                svg += dvg;
                sv2 += dv2;
            } else {  // becomes active above its breakpoint
                svg -= dvg;
                sv2 -= dv2;
            }
            lo = bp.t;
        }
    }
    throw InternalError("active_set_update: no stable active set found "
                        "(indicates a sign-convention bug)");
}

Eigen::MatrixXd active_constraint_matrix(const DesignField& field, const ActiveSet& aset) {
    const int n = field.size();
    aset.element_mask(n);  // range + disjointness
    const Eigen::Index s = 1 + static_cast<Eigen::Index>(aset.lower_active.size()) +
                           static_cast<Eigen::Index>(aset.upper_active.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(s, n);
    H.row(0) = field.elem_volumes.transpose();
    Eigen::Index row = 1;
    for (int e : aset.lower_active) H(row++, e) = -1.0;
    for (int e : aset.upper_active) H(row++, e) = 1.0;
    return H;
}

Eigen::VectorXd multiplier_vector(const ProjectionState& state) {
    const auto& aset = state.active_set;
    Eigen::VectorXd lambda(1 + static_cast<Eigen::Index>(aset.lower_active.size()) +
                           static_cast<Eigen::Index>(aset.upper_active.size()));
    lambda[0] = state.multipliers.lambda_volume;
    Eigen::Index row = 1;
    for (int e : aset.lower_active) lambda[row++] = state.multipliers.lambda_bounds.at(e);
    for (int e : aset.upper_active) lambda[row++] = state.multipliers.lambda_bounds.at(e);
    return lambda;
}

}  // namespace topopt
