#include "topopt/tension.hpp"

#include <cmath>

#include "topopt/kernels.hpp"

namespace topopt {

PrincipalStresses principal_stresses(const StressTensor2D& s) {
    const double center = 0.5 * (s.sxx + s.syy);
    const double half_diff = 0.5 * (s.sxx - s.syy);
    const double radius = std::hypot(half_diff, s.txy);
    PrincipalStresses ps;
    ps.sI = center + radius;
    ps.sII = center - radius;
    ps.theta = 0.5 * std::atan2(2.0 * s.txy, s.sxx - s.syy);
    return ps;
}

PrincipalStresses reduce_stresses(const PrincipalStresses& ps, const TensionConfig& cfg) {
    cfg.validate();
    PrincipalStresses out = ps;
    if (out.sI <= 0.0) out.sI *= cfg.k;
    if (out.sII <= 0.0) out.sII *= cfg.k;
    return out;
}

Eigen::VectorXd tension_gradient(const DesignField& field, const SimpMaterial& mat,
                                 const std::vector<ElementGaussStresses>& stresses,
                                 double detj_thickness, const TensionConfig& cfg) {
    mat.validate();
    cfg.validate();
    if (static_cast<int>(stresses.size()) != field.size())
        throw ParameterError("tension_gradient: stress array size mismatch");
    Eigen::VectorXd out;
    kernels::tension_values(field.rho, mat.p, mat.E0, mat.nu, cfg.k, detj_thickness,
                            stresses, out);
    return out;
}

}  // namespace topopt
