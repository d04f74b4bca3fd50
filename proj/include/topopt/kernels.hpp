#pragma once

#include <Eigen/Core>

#include <vector>

#include "topopt/design.hpp"
#include "topopt/element.hpp"
#include "topopt/grid.hpp"
#include "topopt/stress.hpp"

// Element-sweep kernels. Each kernel is a pure map over elements: every
// loop iteration writes only its own output slots, so the OpenMP variant
// is bit-identical to the serial one for any thread count or schedule.
// All reductions stay outside the kernels as ordered folds.
//
// The unsuffixed entry points run under OpenMP when the build enables it;
// the *_serial twins are the reference implementations kept for testing
// and for the bench_kernels comparison target.
namespace topopt::kernels {

// True when the unsuffixed kernels actually run element loops under OpenMP.
bool parallel_enabled();

// out[e] = rho[e]^p
void simp_factors(const Eigen::VectorXd& rho, double p, Eigen::VectorXd& out);
void simp_factors_serial(const Eigen::VectorXd& rho, double p, Eigen::VectorXd& out);

// out[e] = u_e^T k0 u_e
void element_energies(const StructuredGrid& grid, const ElementStiffness& k0,
                      const Eigen::VectorXd& u, Eigen::VectorXd& out);
void element_energies_serial(const StructuredGrid& grid, const ElementStiffness& k0,
                             const Eigen::VectorXd& u, Eigen::VectorXd& out);

// values[e*64 + 8*a + b] = factors[e] * k0(a, b); the assembly triplet
// pattern is fixed per grid, only these values change with the design.
void assembly_values(const ElementStiffness& k0, const Eigen::VectorXd& factors,
                     Eigen::VectorXd& values);
void assembly_values_serial(const ElementStiffness& k0, const Eigen::VectorXd& factors,
                            Eigen::VectorXd& values);

// out[e] = the four Gauss-point stress tensors of element e, evaluated
// with the per-element effective modulus.
void gauss_stress_sweep(const StructuredGrid& grid, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& E_eff, double nu,
                        std::vector<ElementGaussStresses>& out);
void gauss_stress_sweep_serial(const StructuredGrid& grid, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& E_eff, double nu,
                               std::vector<ElementGaussStresses>& out);

// Tension-only descent values from precomputed Gauss stresses:
// out[e] = (p/rho_e) * sum_g (sI'^2 - 2 nu sI' sII' + sII'^2)
//          / (rho_e^p E0) * detj_thickness
// where sI', sII' are the principal stresses reduced by factor k.
void tension_values(const Eigen::VectorXd& rho, double p, double E0, double nu,
                    double k, double detj_thickness,
                    const std::vector<ElementGaussStresses>& stresses,
                    Eigen::VectorXd& out);
void tension_values_serial(const Eigen::VectorXd& rho, double p, double E0, double nu,
                           double k, double detj_thickness,
                           const std::vector<ElementGaussStresses>& stresses,
                           Eigen::VectorXd& out);

// OC density candidate: clip(rho_e * Be^eta into the move-limit box
// [max((1-zeta) rho_e, rho_min), min((1+zeta) rho_e, 1)]).
void oc_candidates(const Eigen::VectorXd& rho, const Eigen::VectorXd& Be,
                   double eta, double zeta, double rho_min, Eigen::VectorXd& out);
void oc_candidates_serial(const Eigen::VectorXd& rho, const Eigen::VectorXd& Be,
                          double eta, double zeta, double rho_min, Eigen::VectorXd& out);

// Projected-gradient additive candidate with the per-element move limit:
// clip(rho_e + clamp(gamma d_e, -zeta rho_e, zeta rho_e), rho_min, 1).
void additive_candidates(const Eigen::VectorXd& rho, const Eigen::VectorXd& d, double gamma,
                         double zeta, double rho_min, Eigen::VectorXd& out);
void additive_candidates_serial(const Eigen::VectorXd& rho, const Eigen::VectorXd& d,
                                double gamma, double zeta, double rho_min,
                                Eigen::VectorXd& out);

// Volume-restore candidate: frozen elements keep their density, free ones
// get clip(s * rho, rho_min, 1).
void scale_clip_candidates(const Eigen::VectorXd& rho, double s, double rho_min,
                           const std::vector<std::uint8_t>& frozen, Eigen::VectorXd& out);
void scale_clip_candidates_serial(const Eigen::VectorXd& rho, double s, double rho_min,
                                  const std::vector<std::uint8_t>& frozen,
                                  Eigen::VectorXd& out);

}  // namespace topopt::kernels
