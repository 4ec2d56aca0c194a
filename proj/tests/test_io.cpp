#include "nitsche/io.hpp"

#include "../tools/run_config.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nitsche;
namespace fs = std::filesystem;

namespace {

std::size_t count(const std::string& s, const std::string& needle)
{
    std::size_t n = 0;
    for (std::size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

ConvergenceTable table_with(std::vector<double> errors)
{
    ConvergenceTable t;
    t.case_name = "test";
    double h = 1.0;
    for (std::size_t k = 0; k < errors.size(); ++k, h *= 0.5)
        t.records.push_back(ConvergenceRecord{k, h, 4u << (2 * k), 0, errors[k], std::nullopt});
    t.records = eoc(t.records);
    return t;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(NITSCHE_FEM_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("nitsche_io_test_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST(Io, ConvergenceCsv)
{
    const std::string csv = convergence_csv(table_with({0.04, 0.01}));
    EXPECT_EQ(csv, "level,h,elements,dofs,l2_error,eoc\n0,1,4,0,0.04,\n1,0.5,16,0,0.01,2\n");
}

TEST(Io, PlotStructure)
{
    const PlotResult five = emit_plot(table_with({1.0, 0.3, 0.08, 0.02, 0.005}));
    EXPECT_EQ(count(five.svg, "class=\"marker\""), 5u);
    EXPECT_EQ(count(five.svg, "class=\"reference\""), 1u);
    EXPECT_EQ(count(five.svg, "stroke-dasharray"), 1u);
    EXPECT_EQ(count(five.svg, "class=\"data\""), 1u);
    EXPECT_NE(five.svg.find(">h</text>"), std::string::npos);
    EXPECT_NE(five.svg.find(">L2 error</text>"), std::string::npos);
    EXPECT_EQ(five.svg.rfind("<svg", 0), 0u);
    EXPECT_EQ(five.svg.find("href"), std::string::npos);
    EXPECT_TRUE(five.warnings.empty());

    const PlotResult single = emit_plot(table_with({0.1}));
    EXPECT_EQ(count(single.svg, "class=\"marker\""), 1u);
    EXPECT_EQ(count(single.svg, "class=\"reference\""), 0u);
}

TEST(Io, PlotOmitsNonPositiveErrors)
{
    const PlotResult p = emit_plot(table_with({0.1, 0.0, 0.01}));
    EXPECT_EQ(count(p.svg, "class=\"marker\""), 2u);
    EXPECT_EQ(p.warnings.size(), 1u);
    EXPECT_THROW((void)emit_plot(table_with({0.0})), AnalysisError);
}

TEST(Io, MeshDump)
{
    const Mesh m = generate_initial(jump_rectangle_case().domain, ElementKind::P1Triangle, 1);
    std::ostringstream os;
    write_mesh(m, os);
    const std::string s = os.str();
    EXPECT_EQ(s.rfind("nodes 6\n", 0), 0u);
    EXPECT_NE(s.find("elements 4\n"), std::string::npos);
    EXPECT_NE(s.find("boundary 6\n"), std::string::npos);
}

TEST(Io, MatrixDumpIsOneBased)
{
    TripletBuilder b(2);
    b.add(0, 0, 2.0);
    b.add(1, 0, -1.0);
    std::ostringstream os;
    write_matrix(b.finalize(), os);
    EXPECT_EQ(os.str(), "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 2\n2 1 -1\n");
}

TEST(Config, JsonOverlay)
{
    cli::RunConfig cfg;
    cli::apply_json(nlohmann::json::parse(R"({"case": "smooth-sine", "element": "q1", "levels": 3, "plot": true})"),
                    cfg);
    EXPECT_EQ(cfg.case_name, "smooth-sine");
    EXPECT_EQ(cfg.kind, ElementKind::Q1Quad);
    EXPECT_EQ(cfg.levels, 3);
    EXPECT_TRUE(cfg.plot);
    EXPECT_EQ(cfg.gamma, 10.0);
    EXPECT_THROW(cli::apply_json(nlohmann::json::parse(R"({"colour": 1})"), cfg), Error);
    cfg.levels = 0;
    EXPECT_THROW(cli::validate(cfg), Error);
    cfg.levels = 2;
    cfg.case_name = "nope";
    EXPECT_THROW(cli::validate(cfg), Error);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run_cli("solve --help"), 0); }

TEST(Cli, UnknownCaseFails)
{
    const fs::path out = scratch("unknown");
    EXPECT_NE(run_cli("solve --case nope --output " + out.string()), 0);
    EXPECT_NE(run_cli("solve --element p2 --output " + out.string()), 0);
}

TEST(Cli, SmallGammaFails)
{
    const fs::path out = scratch("gamma");
    EXPECT_NE(run_cli("solve --case paper-3-3 --levels 2 --gamma 1 --output " + out.string()), 0);
}

TEST(Cli, WritesRequestedOutputs)
{
    const fs::path out = scratch("outputs");
    ASSERT_EQ(run_cli("solve --case paper-3-3 --levels 3 --plot --dump-mesh --dump-system --dump-solution --output " +
                      out.string()),
              0);
    for (const char* f : {"convergence.csv", "error_plot.svg", "mesh.txt", "system_matrix.mtx", "system_rhs.txt",
                          "solution.csv"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    const std::string csv = slurp(out / "convergence.csv");
    EXPECT_EQ(count(csv, "\n"), 4u);
    EXPECT_EQ(slurp(out / "solution.csv").rfind("x,y,u_h\n", 0), 0u);
}

TEST(Cli, FlagsOverrideConfigFile)
{
    const fs::path out = scratch("config");
    fs::create_directories(out);
    {
        std::ofstream cfg(out / "run.json");
        cfg << R"({"case": "linear-patch", "levels": 4, "output": ")" << (out / "from_file").string() << "\"}";
    }
    ASSERT_EQ(run_cli("solve --config " + (out / "run.json").string() + " --levels 2"), 0);
    const std::string csv = slurp(out / "from_file" / "convergence.csv");
    EXPECT_EQ(count(csv, "\n"), 3u);
}
