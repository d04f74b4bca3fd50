#pragma once

#include <Eigen/Core>

#include "topopt/errors.hpp"

namespace topopt {

// SIMP material: effective modulus rho^p * E0.
struct SimpMaterial {
    double E0 = 1.0;
    double nu = 0.3;
    double p = 3.0;

    void validate() const {
        if (E0 <= 0.0) throw ParameterError("material: E0 must be > 0");
        if (nu < 0.0 || nu >= 0.5) throw ParameterError("material: nu must be in [0, 0.5)");
        if (p < 1.0) throw ParameterError("material: penalty exponent must be >= 1");
    }
};

// Per-element densities with box bounds and a volume target.
struct DesignField {
    Eigen::VectorXd rho;
    double rho_min = 1e-3;
    double volume_target = 0.0;
    Eigen::VectorXd elem_volumes;

    int size() const { return static_cast<int>(rho.size()); }
    double volume() const { return rho.dot(elem_volumes); }

    void validate() const {
        if (rho_min <= 0.0 || rho_min >= 1.0)
            throw ParameterError("design: rho_min must be in (0, 1)");
        if (rho.size() != elem_volumes.size())
            throw ParameterError("design: rho and elem_volumes size mismatch");
        for (int e = 0; e < size(); ++e) {
            if (rho[e] < rho_min || rho[e] > 1.0)
                throw ParameterError("design: density " + std::to_string(rho[e]) +
                                     " at element " + std::to_string(e) + " out of bounds");
        }
    }
};

// rho^p * E0 for a single density. Rejects out-of-bounds densities.
double effective_modulus(double rho_e, double rho_min, const SimpMaterial& mat);

}  // namespace topopt
