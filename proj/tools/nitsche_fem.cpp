#include "run_config.hpp"

#include "nitsche/nitsche.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace nitsche;

namespace {

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
}

void print_table(const ConvergenceTable& t)
{
    std::cout << "case " << t.case_name << ", element " << to_string(t.kind) << ", gamma " << t.gamma << '\n';
    std::cout << std::setw(6) << "level" << std::setw(14) << "h" << std::setw(10) << "elements" << std::setw(8)
              << "dofs" << std::setw(16) << "l2_error" << std::setw(10) << "eoc" << '\n';
    for (const auto& r : t.records) {
        std::cout << std::setw(6) << r.level << std::setw(14) << std::setprecision(6) << r.h << std::setw(10)
                  << r.elements << std::setw(8) << r.dofs << std::setw(16) << std::scientific << std::setprecision(6)
                  << r.l2_error << std::defaultfloat;
        if (r.eoc) std::cout << std::setw(10) << std::fixed << std::setprecision(3) << *r.eoc << std::defaultfloat;
        std::cout << '\n';
    }
}

int run_solve(const cli::RunConfig& cfg)
{
    cli::validate(cfg);
    const ManufacturedCase c = make_case(cfg.case_name);
    const StudyResult study = run_convergence_study(c, cfg.kind, cfg.levels, cfg.gamma, SolverOptions{cfg.tol, {}});

    const fs::path dir(cfg.output);
    fs::create_directories(dir);
    write_file(dir / "convergence.csv", convergence_csv(study.table));
    print_table(study.table);

    if (study.last) {
        const LevelResult& fin = *study.last;
        std::cout << "solver: " << fin.report.method << ", " << fin.report.iterations << " iterations, relative residual "
                  << std::scientific << fin.report.relative_residual << std::defaultfloat << '\n';
        if (cfg.dump_mesh) {
            std::ofstream os(dir / "mesh.txt");
            write_mesh(fin.solution.mesh(), os);
        }
        if (cfg.dump_system) {
            std::ofstream a(dir / "system_matrix.mtx");
            write_matrix(fin.system.matrix, a);
            std::ofstream b(dir / "system_rhs.txt");
            write_rhs(fin.system.rhs, b);
        }
        if (cfg.dump_solution) {
            const double diam = c.domain.diameter();
            const auto& v = c.domain.vertices();
            double x0 = v[0].x, x1 = v[0].x, y0 = v[0].y, y1 = v[0].y;
            for (const Point2 p : v) {
                x0 = std::min(x0, p.x);
                x1 = std::max(x1, p.x);
                y0 = std::min(y0, p.y);
                y1 = std::max(y1, p.y);
            }
            const auto count = [&](double extent) {
                return static_cast<std::size_t>(std::max(1.0, std::round(64.0 * extent / diam)));
            };
            std::ofstream os(dir / "solution.csv");
            write_solution_samples(fin.solution, count(x1 - x0), count(y1 - y0), os);
        }
    }
    if (cfg.plot && !study.table.records.empty()) {
        const PlotResult plot = emit_plot(study.table);
        for (const auto& w : plot.warnings) std::cerr << "warning: " << w << '\n';
        write_file(dir / "error_plot.svg", plot.svg);
    }
    if (study.table.failure) {
        std::cerr << "error: " << *study.table.failure << '\n';
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Nitsche finite elements for diffusion-reaction problems with discontinuous Dirichlet data"};
    app.require_subcommand(1);

    cli::RunConfig flags;
    std::string config_file;
    std::string element = "p1";
    auto* solve = app.add_subcommand("solve", "Run a uniform-refinement convergence study for a registered case");
    solve->add_option("--config", config_file, "JSON configuration file (flags override it)");
    auto* o_case = solve->add_option("--case", flags.case_name, "Case name (paper-3-3, smooth-sine, linear-patch)");
    auto* o_elem = solve->add_option("--element", element, "Element kind")->check(CLI::IsMember({"p1", "q1"}));
    auto* o_levels = solve->add_option("--levels", flags.levels, "Number of refinement levels");
    auto* o_gamma = solve->add_option("--gamma", flags.gamma, "Nitsche penalty parameter");
    auto* o_tol = solve->add_option("--tol", flags.tol, "Relative residual tolerance of the solver");
    auto* o_out = solve->add_option("--output", flags.output, "Output directory");
    auto* o_dm = solve->add_flag("--dump-mesh", flags.dump_mesh, "Write the finest mesh to mesh.txt");
    auto* o_ds = solve->add_flag("--dump-system", flags.dump_system, "Write the finest linear system");
    auto* o_dsol = solve->add_flag("--dump-solution", flags.dump_solution, "Write u_h samples to solution.csv");
    auto* o_plot = solve->add_flag("--plot", flags.plot, "Write error_plot.svg");

    CLI11_PARSE(app, argc, argv);

    try {
        cli::RunConfig cfg;
        if (!config_file.empty()) cli::load_json_file(config_file, cfg);
        if (o_case->count()) cfg.case_name = flags.case_name;
        if (o_elem->count()) cfg.kind = cli::parse_kind(element);
        if (o_levels->count()) cfg.levels = flags.levels;
        if (o_gamma->count()) cfg.gamma = flags.gamma;
        if (o_tol->count()) cfg.tol = flags.tol;
        if (o_out->count()) cfg.output = flags.output;
        if (o_dm->count()) cfg.dump_mesh = true;
        if (o_ds->count()) cfg.dump_system = true;
        if (o_dsol->count()) cfg.dump_solution = true;
        if (o_plot->count()) cfg.plot = true;
        return run_solve(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
