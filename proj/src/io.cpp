#include "topopt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace topopt {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void emit_density_pgm(const DesignField& field, const StructuredGrid& grid,
                      const std::filesystem::path& path) {
    if (field.size() != grid.num_elements())
        throw ParameterError("emit_density_pgm: field/grid size mismatch");
    std::ostringstream out;
    out << "P2\n" << grid.nx << ' ' << grid.ny << "\n255\n";
    for (int j = grid.ny - 1; j >= 0; --j) {  // top row first
        for (int i = 0; i < grid.nx; ++i) {
            const double rho = field.rho[grid.element_index(i, j)];
            // round half up, solid material black
            int pixel = static_cast<int>(std::floor(255.0 * (1.0 - rho) + 0.5));
            pixel = std::clamp(pixel, 0, 255);
            if (i > 0) out << ' ';
            out << pixel;
        }
        out << '\n';
    }
    write_file_atomic(path, out.str());
}

void emit_density_csv(const DesignField& field, const StructuredGrid& grid,
                      const std::filesystem::path& path) {
    if (field.size() != grid.num_elements())
        throw ParameterError("emit_density_csv: field/grid size mismatch");
    std::ostringstream out;
    for (int j = grid.ny - 1; j >= 0; --j) {
        for (int i = 0; i < grid.nx; ++i) {
            if (i > 0) out << ',';
            out << format_g17(field.rho[grid.element_index(i, j)]);
        }
        out << '\n';
    }
    write_file_atomic(path, out.str());
}

void emit_convergence_csv(const ConvergenceRecord& record, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "iter,compliance,volume,kkt_inf,max_change,lambda\n";
    for (const auto& row : record) {
        out << row.iter << ',' << format_g17(row.compliance) << ',' << format_g17(row.volume)
            << ',' << format_g17(row.kkt_residual_inf) << ','
            << format_g17(row.max_density_change) << ',' << format_g17(row.lambda_volume)
            << '\n';
    }
    write_file_atomic(path, out.str());
}

}  // namespace topopt
