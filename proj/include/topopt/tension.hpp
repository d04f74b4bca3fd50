#pragma once

#include <Eigen/Core>

#include <vector>

#include "topopt/design.hpp"
#include "topopt/stress.hpp"

namespace topopt {

// Principal values of a 2D stress tensor, sI >= sII, with the rotation
// angle of the major axis.
struct PrincipalStresses {
    double sI = 0.0;
    double sII = 0.0;
    double theta = 0.0;
};

// Reduction factor applied to compressive principal stresses. k = 1
// disables the reduction (admitted for the verification identity against
// the standard compliance gradient).
struct TensionConfig {
    double k = 0.0;

    void validate() const {
        if (k < 0.0 || k > 1.0)
            throw ParameterError("tension: reduction factor k must be in [0, 1]");
    }
};

// Eigen-decomposition of the 2x2 stress tensor; trace and determinant are
// preserved.
PrincipalStresses principal_stresses(const StressTensor2D& s);

// Keep tensile principal values, scale compressive ones by k.
PrincipalStresses reduce_stresses(const PrincipalStresses& ps, const TensionConfig& cfg);

// Tension-only descent direction (the -f,rho_e analog): per element
//   (p/rho_e) * sum_g (sI'^2 - 2 nu sI' sII' + sII'^2) / (rho_e^p E0)
//              * detJ * thickness
// with reduced principal stresses sI', sII'. The stresses must have been
// evaluated with the SIMP modulus rho^p E0; then k = 1 reproduces
// -compliance_gradient exactly (stress-form and strain-form energies agree).
Eigen::VectorXd tension_gradient(const DesignField& field, const SimpMaterial& mat,
                                 const std::vector<ElementGaussStresses>& stresses,
                                 double detj_thickness, const TensionConfig& cfg);

}  // namespace topopt
