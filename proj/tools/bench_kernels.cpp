// Timing comparison of the serial reference kernels against the OpenMP
// entry points, on a grid large enough for the sweeps to dominate.
// Also cross-checks that both paths produce bit-identical results.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <vector>

#include "topopt/element.hpp"
#include "topopt/grid.hpp"
#include "topopt/kernels.hpp"

#ifdef TOPOPT_HAVE_OPENMP
#include <omp.h>
#endif

using namespace topopt;

namespace {

double seconds_per_call(int repeats, const std::function<void()>& fn) {
    fn();  // warm up
    const auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r) fn();
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return elapsed.count() / repeats;
}

void report(const char* name, double t_serial, double t_parallel, bool identical) {
    std::printf("%-22s %12.6f ms %12.6f ms   speedup %5.2fx   identical %s\n", name,
                1e3 * t_serial, 1e3 * t_parallel, t_serial / t_parallel,
                identical ? "yes" : "NO");
}

bool bitwise_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<size_t>(a.size())) == 0;
}

}  // namespace

int main(int argc, char** argv) {
    int nx = 512;
    int ny = 256;
    int repeats = 20;
    if (argc > 1 && std::strcmp(argv[1], "--quick") == 0) {
        nx = 64;
        ny = 32;
        repeats = 3;
    }

    const StructuredGrid grid(nx, ny);
    const ElementStiffness k0 = element_stiffness(1.0, 0.3, grid);
    const int n = grid.num_elements();

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dens(0.05, 1.0);
    std::normal_distribution<double> disp(0.0, 1.0);

    Eigen::VectorXd rho(n);
    for (int e = 0; e < n; ++e) rho[e] = dens(rng);
    Eigen::VectorXd u(grid.num_dofs());
    for (int i = 0; i < grid.num_dofs(); ++i) u[i] = disp(rng);
    Eigen::VectorXd Be = rho.cwiseInverse();
    Eigen::VectorXd E_eff = rho.array().pow(3.0);

#ifdef TOPOPT_HAVE_OPENMP
    std::printf("grid %dx%d (%d elements), OpenMP max threads %d\n\n", nx, ny, n,
                omp_get_max_threads());
#else
    std::printf("grid %dx%d (%d elements), built without OpenMP\n\n", nx, ny, n);
#endif

    {
        Eigen::VectorXd out_s, out_p;
        const double ts = seconds_per_call(repeats,
            [&] { kernels::simp_factors_serial(rho, 3.0, out_s); });
        const double tp = seconds_per_call(repeats,
            [&] { kernels::simp_factors(rho, 3.0, out_p); });
        report("simp_factors", ts, tp, bitwise_equal(out_s, out_p));
    }
    {
        Eigen::VectorXd out_s, out_p;
        const double ts = seconds_per_call(repeats,
            [&] { kernels::element_energies_serial(grid, k0, u, out_s); });
        const double tp = seconds_per_call(repeats,
            [&] { kernels::element_energies(grid, k0, u, out_p); });
        report("element_energies", ts, tp, bitwise_equal(out_s, out_p));
    }
    {
        Eigen::VectorXd factors = rho.array().pow(3.0);
        Eigen::VectorXd out_s, out_p;
        const double ts = seconds_per_call(repeats,
            [&] { kernels::assembly_values_serial(k0, factors, out_s); });
        const double tp = seconds_per_call(repeats,
            [&] { kernels::assembly_values(k0, factors, out_p); });
        report("assembly_values", ts, tp, bitwise_equal(out_s, out_p));
    }
    std::vector<ElementGaussStresses> stresses_s, stresses_p;
    {
        const double ts = seconds_per_call(repeats,
            [&] { kernels::gauss_stress_sweep_serial(grid, u, E_eff, 0.3, stresses_s); });
        const double tp = seconds_per_call(repeats,
            [&] { kernels::gauss_stress_sweep(grid, u, E_eff, 0.3, stresses_p); });
        const bool same = std::memcmp(stresses_s.data(), stresses_p.data(),
                                      sizeof(ElementGaussStresses) * stresses_s.size()) == 0;
        report("gauss_stress_sweep", ts, tp, same);
    }
    {
        Eigen::VectorXd out_s, out_p;
        const double ts = seconds_per_call(repeats, [&] {
            kernels::tension_values_serial(rho, 3.0, 1.0, 0.3, 0.0, 0.25, stresses_s, out_s);
        });
        const double tp = seconds_per_call(repeats, [&] {
            kernels::tension_values(rho, 3.0, 1.0, 0.3, 0.0, 0.25, stresses_p, out_p);
        });
        report("tension_values", ts, tp, bitwise_equal(out_s, out_p));
    }
    {
        Eigen::VectorXd out_s, out_p;
        const double ts = seconds_per_call(repeats, [&] {
            kernels::oc_candidates_serial(rho, Be, 1.0, 0.2, 1e-3, out_s);
        });
        const double tp = seconds_per_call(repeats, [&] {
            kernels::oc_candidates(rho, Be, 1.0, 0.2, 1e-3, out_p);
        });
        report("oc_candidates", ts, tp, bitwise_equal(out_s, out_p));
    }
    return 0;
}
