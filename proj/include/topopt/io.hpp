#pragma once

#include <filesystem>
#include <string>

#include "topopt/design.hpp"
#include "topopt/grid.hpp"
#include "topopt/optimizers.hpp"

namespace topopt {

// ASCII PGM (P2) density image: one pixel per element, width nx, height
// ny, maxval 255, pixel = round(255 * (1 - rho)) with ties rounding up, so
// solid material is black. Rows run top to bottom (largest y first).
void emit_density_pgm(const DesignField& field, const StructuredGrid& grid,
                      const std::filesystem::path& path);

// Raw densities as CSV, nx columns by ny rows, same orientation as the
// PGM, 17 significant digits (round-trip exact).
void emit_density_csv(const DesignField& field, const StructuredGrid& grid,
                      const std::filesystem::path& path);

// Convergence log: header iter,compliance,volume,kkt_inf,max_change,lambda
// and one row per iteration, 17 significant digits.
void emit_convergence_csv(const ConvergenceRecord& record, const std::filesystem::path& path);

// All emitters write through a temporary file in the target directory and
// rename it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// 17-significant-digit decimal form of x (shortest round-trip-exact is not
// required; the fixed width keeps outputs byte-stable).
std::string format_g17(double x);

}  // namespace topopt
