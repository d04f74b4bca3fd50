#include "topopt/problems.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace topopt {

DesignField ProblemDefinition::initial_field(double rho_min) const {
    if (volume_fraction < rho_min)
        throw ParameterError("problem: volume fraction " + std::to_string(volume_fraction) +
                             " below rho_min " + std::to_string(rho_min));
    DesignField field;
    const int n = grid.num_elements();
    field.rho = Eigen::VectorXd::Constant(n, volume_fraction);
    field.rho_min = rho_min;
    field.elem_volumes = Eigen::VectorXd::Constant(n, grid.element_volume());
    field.volume_target = volume_fraction * field.elem_volumes.sum();
    return field;
}

void ProblemDefinition::validate() const {
    grid.validate();
    material.validate();
    if (volume_fraction <= 0.0 || volume_fraction >= 1.0)
        throw ValidationError("problem: volume fraction must be in (0, 1), got " +
                              std::to_string(volume_fraction));
    if (tension) tension->validate();
    boundary_conditions();  // range and fixed-vs-loaded checks
    if (loads.empty()) throw ValidationError("problem: no loads");
    if (fixed_dofs.size() < 3) throw ValidationError("problem: fewer than 3 fixed dofs "
                                                     "cannot remove the rigid-body modes");
}

ProblemDefinition builtin_problem(const std::string& name, int nx, int ny,
                                  double volume_fraction) {
    if (nx < 2 || ny < 2) throw ParameterError("builtin_problem: nx, ny must be >= 2");
    ProblemDefinition problem;
    problem.grid = StructuredGrid(nx, ny);
    problem.volume_fraction = volume_fraction;

    const auto xdof = [&](int i, int j) { return 2 * problem.grid.node_index(i, j); };
    const auto ydof = [&](int i, int j) { return 2 * problem.grid.node_index(i, j) + 1; };

    if (name == "cantilever") {
        // left edge fully fixed, unit downward load at right-edge midheight
        for (int j = 0; j <= ny; ++j) {
            problem.fixed_dofs.push_back(xdof(0, j));
            problem.fixed_dofs.push_back(ydof(0, j));
        }
        problem.loads.push_back({ydof(nx, ny / 2), -1.0});
    } else if (name == "mbb") {
        // symmetry half-model: left-edge x dofs fixed, bottom-right corner
        // held in y, unit downward load at the top-left node
        for (int j = 0; j <= ny; ++j) problem.fixed_dofs.push_back(xdof(0, j));
        problem.fixed_dofs.push_back(ydof(nx, 0));
        problem.loads.push_back({ydof(0, ny), -1.0});
    } else if (name == "bridge") {
        // deck along the bottom edge, pinned at both bottom corners; the
        // corner nodes are supports, so the uniform deck load goes on the
        // free bottom-edge nodes
        problem.fixed_dofs.push_back(xdof(0, 0));
        problem.fixed_dofs.push_back(ydof(0, 0));
        problem.fixed_dofs.push_back(xdof(nx, 0));
        problem.fixed_dofs.push_back(ydof(nx, 0));
        for (int i = 1; i < nx; ++i) problem.loads.push_back({ydof(i, 0), -1.0});
        problem.mirror_symmetric = true;
    } else {
        throw ParameterError("builtin_problem: unknown name '" + name +
                             "' (valid: cantilever, mbb, bridge)");
    }
    problem.validate();
    return problem;
}

namespace {

double parse_number(const std::string& text, int line) {
    try {
        size_t pos = 0;
        const double value = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw ParseError(line, "expected a number, got '" + text + "'");
    }
}

int parse_int(const std::string& text, int line) {
    try {
        size_t pos = 0;
        const int value = std::stoi(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw ParseError(line, "expected an integer, got '" + text + "'");
    }
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream stream(s);
    std::string part;
    while (std::getline(stream, part, sep)) parts.push_back(trim(part));
    return parts;
}

}  // namespace

ProblemDefinition load_problem(const std::string& contents) {
    struct RawFix {
        int node;
        std::string axes;
        int line;
    };
    struct RawLoad {
        int node;
        std::string axis;
        double magnitude;
        int line;
    };

    int nx = -1;
    int ny = -1;
    double elem_w = 1.0;
    double elem_h = 1.0;
    double thickness = 1.0;
    SimpMaterial material;
    double volfrac = -1.0;
    std::optional<double> tension_k;
    std::vector<RawFix> fixes;
    std::vector<RawLoad> load_entries;

    std::stringstream stream(contents);
    std::string raw_line;
    int line_no = 0;
    while (std::getline(stream, raw_line)) {
        ++line_no;
        const auto comment = raw_line.find('#');
        if (comment != std::string::npos) raw_line.erase(comment);
        const std::string line = trim(raw_line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(line_no, "expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) throw ParseError(line_no, "empty value for key '" + key + "'");

        if (key == "nx") {
            nx = parse_int(value, line_no);
        } else if (key == "ny") {
            ny = parse_int(value, line_no);
        } else if (key == "elem_w") {
            elem_w = parse_number(value, line_no);
        } else if (key == "elem_h") {
            elem_h = parse_number(value, line_no);
        } else if (key == "thickness") {
            thickness = parse_number(value, line_no);
        } else if (key == "E0") {
            material.E0 = parse_number(value, line_no);
        } else if (key == "nu") {
            material.nu = parse_number(value, line_no);
        } else if (key == "penalty") {
            material.p = parse_number(value, line_no);
        } else if (key == "volfrac") {
            volfrac = parse_number(value, line_no);
        } else if (key == "tension_k") {
            tension_k = parse_number(value, line_no);
        } else if (key == "fix") {
            const auto parts = split(value, ',');
            if (parts.size() != 2) throw ParseError(line_no, "fix wants <node>,<x|y|xy>");
            fixes.push_back({parse_int(parts[0], line_no), parts[1], line_no});
        } else if (key == "load") {
            const auto parts = split(value, ',');
            if (parts.size() != 3) throw ParseError(line_no, "load wants <node>,<x|y>,<magnitude>");
            load_entries.push_back({parse_int(parts[0], line_no), parts[1],
                                    parse_number(parts[2], line_no), line_no});
        } else {
            throw ParseError(line_no, "unknown key '" + key + "'");
        }
    }

    if (nx < 1 || ny < 1) throw ValidationError("problem file: nx and ny are required and >= 1");
    if (volfrac < 0.0) throw ValidationError("problem file: volfrac is required");

    ProblemDefinition problem;
    problem.grid = StructuredGrid(nx, ny, elem_w, elem_h, thickness);
    problem.material = material;
    problem.volume_fraction = volfrac;
    if (tension_k) problem.tension = TensionConfig{*tension_k};

    const int num_nodes = problem.grid.num_nodes();
    for (const auto& fix : fixes) {
        if (fix.node < 0 || fix.node >= num_nodes)
            throw ValidationError("fix at line " + std::to_string(fix.line) + ": node " +
                                  std::to_string(fix.node) + " out of range");
        if (fix.axes == "x") {
            problem.fixed_dofs.push_back(2 * fix.node);
        } else if (fix.axes == "y") {
            problem.fixed_dofs.push_back(2 * fix.node + 1);
        } else if (fix.axes == "xy") {
            problem.fixed_dofs.push_back(2 * fix.node);
            problem.fixed_dofs.push_back(2 * fix.node + 1);
        } else {
            throw ValidationError("fix at line " + std::to_string(fix.line) +
                                  ": axes must be x, y or xy, got '" + fix.axes + "'");
        }
    }
    for (const auto& load : load_entries) {
        if (load.node < 0 || load.node >= num_nodes)
            throw ValidationError("load at line " + std::to_string(load.line) + ": node " +
                                  std::to_string(load.node) + " out of range");
        int dof = 2 * load.node;
        if (load.axis == "y") {
            dof += 1;
        } else if (load.axis != "x") {
            throw ValidationError("load at line " + std::to_string(load.line) +
                                  ": axis must be x or y, got '" + load.axis + "'");
        }
        problem.loads.push_back({dof, load.magnitude});
    }

    try {
        problem.validate();
    } catch (const ParameterError& err) {
        throw ValidationError(err.what());
    }
    return problem;
}

}  // namespace topopt
