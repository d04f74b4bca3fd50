#include "topopt/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "topopt/io.hpp"
#include "topopt/optimizers.hpp"
#include "topopt/problems.hpp"

namespace topopt {

namespace {

ProblemDefinition resolve_problem(const std::string& source, int nx, int ny, double volfrac,
                                  double penalty) {
    if (source == "cantilever" || source == "mbb" || source == "bridge") {
        ProblemDefinition problem = builtin_problem(source, nx, ny, volfrac);
        problem.material.p = penalty;
        problem.validate();
        return problem;
    }
    std::ifstream in(source);
    if (!in) throw ParameterError("cannot open problem file '" + source + "'");
    std::ostringstream contents;
    contents << in.rdbuf();
    return load_problem(contents.str());
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"2D SIMP topology optimization (optimality criteria and projected gradient)"};

    std::string problem_source = "cantilever";
    int nx = 40;
    int ny = 20;
    double volfrac = 0.5;
    double penalty = 3.0;
    std::string optimizer = "oc";
    double move_limit = 0.2;
    double damping = 1.0;
    double gamma = 1.0;
    double tension_k = -1.0;
    double tol = -1.0;
    int max_iters = 300;
    std::string out_dir = ".";
    bool no_pgm = false;
    bool no_csv = false;

    app.add_option("--problem", problem_source,
                   "builtin name (cantilever, mbb, bridge) or problem-file path");
    app.add_option("--nx", nx, "elements in x (builtin problems)");
    app.add_option("--ny", ny, "elements in y (builtin problems)");
    app.add_option("--volfrac", volfrac, "volume fraction (builtin problems)");
    app.add_option("--penalty", penalty, "SIMP penalty exponent (builtin problems)");
    app.add_option("--optimizer", optimizer, "oc | pg-add | pg-mult");
    app.add_option("--move-limit", move_limit, "move limit zeta");
    app.add_option("--damping", damping, "OC damping exponent eta on B_e");
    app.add_option("--gamma", gamma, "projected-gradient step (auto-capped by the move limit)");
    app.add_option("--tension-k", tension_k, "compressive-stress reduction factor in [0, 1]");
    app.add_option("--tol", tol, "stopping tolerance (default: 1e-3 OC, 1e-2 PG)");
    app.add_option("--max-iters", max_iters, "iteration cap");
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--no-pgm", no_pgm, "skip density.pgm");
    app.add_flag("--no-csv", no_csv, "skip density.csv");

    // CLI11 wants argv-style input, reversed
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        OptimizerChoice choice;
        PgConfig pg_cfg;
        OcConfig oc_cfg;
        if (optimizer == "oc") {
            choice = OptimizerChoice::oc;
        } else if (optimizer == "pg-add") {
            choice = OptimizerChoice::pg;
            pg_cfg.mode = PgMode::additive;
        } else if (optimizer == "pg-mult") {
            choice = OptimizerChoice::pg;
            pg_cfg.mode = PgMode::multiplicative;
        } else {
            std::cerr << "error: unknown optimizer '" << optimizer
                      << "' (valid optimizers: oc, pg-add, pg-mult)\n";
            return 1;
        }

        oc_cfg.move_limit = move_limit;
        oc_cfg.damping = damping;
        oc_cfg.max_iters = max_iters;
        if (tol > 0.0) oc_cfg.tol = tol;
        pg_cfg.step = gamma;
        pg_cfg.move_limit = move_limit;
        pg_cfg.max_iters = max_iters;
        if (tol > 0.0) pg_cfg.tol = tol;

        ProblemDefinition problem = resolve_problem(problem_source, nx, ny, volfrac, penalty);
        if (tension_k >= 0.0) problem.tension = TensionConfig{tension_k};

        const RunResult result = run_optimization(problem, choice, oc_cfg, pg_cfg);

        const std::filesystem::path dir(out_dir);
        std::filesystem::create_directories(dir);
        if (!no_pgm) emit_density_pgm(result.field, problem.grid, dir / "density.pgm");
        if (!no_csv) emit_density_csv(result.field, problem.grid, dir / "density.csv");
        emit_convergence_csv(result.record, dir / "convergence.csv");

        std::cout << (result.converged ? "converged" : "iteration cap reached") << " after "
                  << result.iterations << " iterations, compliance "
                  << format_g17(result.final_compliance) << ", volume "
                  << format_g17(result.field.volume());
        if (problem.tension)
            std::cout << ", reduced energy " << format_g17(result.final_reduced_energy);
        std::cout << '\n';
        return result.converged ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace topopt
