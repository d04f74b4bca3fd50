#include "topopt/kernels.hpp"

#include <cmath>

#include "topopt/tension.hpp"

#ifdef TOPOPT_HAVE_OPENMP
#include <omp.h>
#endif

namespace topopt::kernels {

namespace {

// Shared loop driver: the serial and parallel entry points of every kernel
// run the same body, so their outputs are bit-identical by construction.
template <class Body>
void element_loop(int n, bool parallel, const Body& body) {
#ifdef TOPOPT_HAVE_OPENMP
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int e = 0; e < n; ++e) body(e);
        return;
    }
#else
    (void)parallel;
#endif
    for (int e = 0; e < n; ++e) body(e);
}

void simp_factors_impl(const Eigen::VectorXd& rho, double p, Eigen::VectorXd& out,
                       bool parallel) {
    out.resize(rho.size());
    element_loop(static_cast<int>(rho.size()), parallel,
                 [&](int e) { out[e] = std::pow(rho[e], p); });
}

void element_energies_impl(const StructuredGrid& grid, const ElementStiffness& k0,
                           const Eigen::VectorXd& u, Eigen::VectorXd& out, bool parallel) {
    if (u.size() != grid.num_dofs())
        throw ParameterError("element_energies: displacement size mismatch");
    out.resize(grid.num_elements());
    element_loop(grid.num_elements(), parallel, [&](int e) {
        const auto dofs = grid.element_dofs(e);
        Eigen::Matrix<double, 8, 1> ue;
        for (int a = 0; a < 8; ++a) ue[a] = u[dofs[a]];
        out[e] = ue.dot(k0.k0 * ue);
    });
}

void assembly_values_impl(const ElementStiffness& k0, const Eigen::VectorXd& factors,
                          Eigen::VectorXd& values, bool parallel) {
    const int n = static_cast<int>(factors.size());
    values.resize(64 * static_cast<Eigen::Index>(n));
    element_loop(n, parallel, [&](int e) {
        const double f = factors[e];
        double* slot = values.data() + 64 * static_cast<std::ptrdiff_t>(e);
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) slot[8 * a + b] = f * k0.k0(a, b);
    });
}

void gauss_stress_sweep_impl(const StructuredGrid& grid, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& E_eff, double nu,
                             std::vector<ElementGaussStresses>& out, bool parallel) {
    const int n = grid.num_elements();
    if (E_eff.size() != n) throw ParameterError("gauss_stress_sweep: E_eff size mismatch");
    if (u.size() != grid.num_dofs())
        throw ParameterError("gauss_stress_sweep: displacement size mismatch");
    out.resize(static_cast<size_t>(n));
    const Displacements disp{u};  // one copy, shared read-only by the sweep
    element_loop(n, parallel, [&](int e) {
        out[static_cast<size_t>(e)] = gauss_point_stresses(grid, e, disp, E_eff[e], nu);
    });
}

void tension_values_impl(const Eigen::VectorXd& rho, double p, double E0, double nu,
                         double k, double detj_thickness,
                         const std::vector<ElementGaussStresses>& stresses,
                         Eigen::VectorXd& out, bool parallel) {
    const int n = static_cast<int>(rho.size());
    if (static_cast<int>(stresses.size()) != n)
        throw ParameterError("tension_values: stress array size mismatch");
    out.resize(n);
    const TensionConfig cfg{k};
    element_loop(n, parallel, [&](int e) {
        double acc = 0.0;
        const double inv_Eeff = 1.0 / (std::pow(rho[e], p) * E0);
        for (const auto& s : stresses[static_cast<size_t>(e)]) {
            const auto ps = reduce_stresses(principal_stresses(s), cfg);
            acc += inv_Eeff * (ps.sI * ps.sI - 2.0 * nu * ps.sI * ps.sII + ps.sII * ps.sII) *
                   detj_thickness;
        }
        out[e] = (p / rho[e]) * acc;
    });
}

void oc_candidates_impl(const Eigen::VectorXd& rho, const Eigen::VectorXd& Be, double eta,
                        double zeta, double rho_min, Eigen::VectorXd& out, bool parallel) {
    if (Be.size() != rho.size()) throw ParameterError("oc_candidates: Be size mismatch");
    out.resize(rho.size());
    element_loop(static_cast<int>(rho.size()), parallel, [&](int e) {
        const double lo = std::max((1.0 - zeta) * rho[e], rho_min);
        const double hi = std::min((1.0 + zeta) * rho[e], 1.0);
        const double candidate = rho[e] * std::pow(Be[e], eta);
        out[e] = std::clamp(candidate, lo, hi);
    });
}

void additive_candidates_impl(const Eigen::VectorXd& rho, const Eigen::VectorXd& d,
                              double gamma, double zeta, double rho_min, Eigen::VectorXd& out,
                              bool parallel) {
    if (d.size() != rho.size()) throw ParameterError("additive_candidates: d size mismatch");
    out.resize(rho.size());
    element_loop(static_cast<int>(rho.size()), parallel, [&](int e) {
        const double move = std::clamp(gamma * d[e], -zeta * rho[e], zeta * rho[e]);
        out[e] = std::clamp(rho[e] + move, rho_min, 1.0);
    });
}

void scale_clip_candidates_impl(const Eigen::VectorXd& rho, double s, double rho_min,
                                const std::vector<std::uint8_t>& frozen,
                                Eigen::VectorXd& out, bool parallel) {
    if (!frozen.empty() && frozen.size() != static_cast<size_t>(rho.size()))
        throw ParameterError("scale_clip_candidates: frozen mask size mismatch");
    out.resize(rho.size());
    element_loop(static_cast<int>(rho.size()), parallel, [&](int e) {
        if (!frozen.empty() && frozen[static_cast<size_t>(e)])
            out[e] = rho[e];
        else
            out[e] = std::clamp(s * rho[e], rho_min, 1.0);
    });
}

}  // namespace

bool parallel_enabled() {
#ifdef TOPOPT_HAVE_OPENMP
    return omp_get_max_threads() > 1;
#else
    return false;
#endif
}

void simp_factors(const Eigen::VectorXd& rho, double p, Eigen::VectorXd& out) {
    simp_factors_impl(rho, p, out, true);
}
void simp_factors_serial(const Eigen::VectorXd& rho, double p, Eigen::VectorXd& out) {
    simp_factors_impl(rho, p, out, false);
}

void element_energies(const StructuredGrid& grid, const ElementStiffness& k0,
                      const Eigen::VectorXd& u, Eigen::VectorXd& out) {
    element_energies_impl(grid, k0, u, out, true);
}
void element_energies_serial(const StructuredGrid& grid, const ElementStiffness& k0,
                             const Eigen::VectorXd& u, Eigen::VectorXd& out) {
    element_energies_impl(grid, k0, u, out, false);
}

void assembly_values(const ElementStiffness& k0, const Eigen::VectorXd& factors,
                     Eigen::VectorXd& values) {
    assembly_values_impl(k0, factors, values, true);
}
void assembly_values_serial(const ElementStiffness& k0, const Eigen::VectorXd& factors,
                            Eigen::VectorXd& values) {
    assembly_values_impl(k0, factors, values, false);
}

void gauss_stress_sweep(const StructuredGrid& grid, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& E_eff, double nu,
                        std::vector<ElementGaussStresses>& out) {
    gauss_stress_sweep_impl(grid, u, E_eff, nu, out, true);
}
void gauss_stress_sweep_serial(const StructuredGrid& grid, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& E_eff, double nu,
                               std::vector<ElementGaussStresses>& out) {
    gauss_stress_sweep_impl(grid, u, E_eff, nu, out, false);
}

void tension_values(const Eigen::VectorXd& rho, double p, double E0, double nu, double k,
                    double detj_thickness, const std::vector<ElementGaussStresses>& stresses,
                    Eigen::VectorXd& out) {
    tension_values_impl(rho, p, E0, nu, k, detj_thickness, stresses, out, true);
}
void tension_values_serial(const Eigen::VectorXd& rho, double p, double E0, double nu,
                           double k, double detj_thickness,
                           const std::vector<ElementGaussStresses>& stresses,
                           Eigen::VectorXd& out) {
    tension_values_impl(rho, p, E0, nu, k, detj_thickness, stresses, out, false);
}

void oc_candidates(const Eigen::VectorXd& rho, const Eigen::VectorXd& Be, double eta,
                   double zeta, double rho_min, Eigen::VectorXd& out) {
    oc_candidates_impl(rho, Be, eta, zeta, rho_min, out, true);
}
void oc_candidates_serial(const Eigen::VectorXd& rho, const Eigen::VectorXd& Be, double eta,
                          double zeta, double rho_min, Eigen::VectorXd& out) {
    oc_candidates_impl(rho, Be, eta, zeta, rho_min, out, false);
}

void additive_candidates(const Eigen::VectorXd& rho, const Eigen::VectorXd& d, double gamma,
                         double zeta, double rho_min, Eigen::VectorXd& out) {
    additive_candidates_impl(rho, d, gamma, zeta, rho_min, out, true);
}
void additive_candidates_serial(const Eigen::VectorXd& rho, const Eigen::VectorXd& d,
                                double gamma, double zeta, double rho_min,
                                Eigen::VectorXd& out) {
    additive_candidates_impl(rho, d, gamma, zeta, rho_min, out, false);
}

void scale_clip_candidates(const Eigen::VectorXd& rho, double s, double rho_min,
                           const std::vector<std::uint8_t>& frozen, Eigen::VectorXd& out) {
    scale_clip_candidates_impl(rho, s, rho_min, frozen, out, true);
}
void scale_clip_candidates_serial(const Eigen::VectorXd& rho, double s, double rho_min,
                                  const std::vector<std::uint8_t>& frozen,
                                  Eigen::VectorXd& out) {
    scale_clip_candidates_impl(rho, s, rho_min, frozen, out, false);
}

}  // namespace topopt::kernels
