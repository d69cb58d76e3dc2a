#include <sys/wait.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "json.hpp"
#include "vortex/cli.hpp"

using namespace vortex;
using namespace vortex::cli;
using vortex::test::for_all;
using vortex::test::Gen;
namespace fs = std::filesystem;

namespace
{
constexpr double pi = std::numbers::pi;

const char* const cheap_map = R"({
  "m1_min": 5, "m1_max": 5, "m2_min": 0, "m2_max": 0,
  "quadrature": {"node_count": 6, "q_node_count": 8, "rel_tol": 1, "abs_tol": 1}
})";

class Scratch
{
  public:
    Scratch()
    {
        std::random_device rd;
        dir_ = fs::temp_directory_path() / ("vortex_cli_" + std::to_string(rd()));
        fs::create_directories(dir_);
    }
    ~Scratch() { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const
    {
        std::ofstream(path(name)) << text;
        return path(name);
    }

  private:
    fs::path dir_;
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run_exe(const std::string& args)
{
    const std::string cmd = std::string(VORTEX_EXE) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool has_problem(const std::vector<std::string>& problems, const std::string& needle)
{
    for (const auto& p : problems)
        if (p.find(needle) != std::string::npos)
            return true;
    return false;
}
} // namespace

//---------------------------------------------------------------------------//
// Config
//---------------------------------------------------------------------------//

TEST(Config, DefaultsFromEmptyObject)
{
    const RunConfig c = parse_config("{}");
    EXPECT_EQ(c.m, 5);
    EXPECT_EQ(c.theta, 0.2);
    EXPECT_EQ(c.kappa02, 0.5);
    EXPECT_EQ(c.m1_min, -5);
    EXPECT_EQ(c.m2_max, 10);
    EXPECT_EQ(c.quadrature.node_count, default_map_quadrature().node_count);
    EXPECT_EQ(c.seed, 20240607u);
}

TEST(Config, ReadsEveryKey)
{
    const RunConfig c = parse_config(R"({
      "m": -3, "theta": 0.5, "kappa0": 2, "kappa01": 1.5, "kappa02": 0.7, "sigma_rel": 0.1, "kz": 40,
      "q": 0.01, "m1": 2, "m2": -4, "m1_min": 0, "m1_max": 3, "m2_min": -2, "m2_max": 2,
      "m0_re": 0.5, "m0_im": -1,
      "quadrature": {"node_count": 10, "abs_tol": 1e-5, "rel_tol": 1e-3, "max_refinements": 3, "q_node_count": 12},
      "root_find": {"residual_tol": 1e-12, "max_iterations": 40, "start_grid_density": 5, "dedupe_tol": 1e-6},
      "seed": 18446744073709551615, "sample_count": 7, "dispersion_threshold": 1e-6, "paraxial_factor": 50,
      "r_max": 4, "grid_n": 9, "threads": 2
    })");
    EXPECT_EQ(c.m, -3);
    EXPECT_EQ(c.kz, 40);
    EXPECT_EQ(c.m2, -4);
    EXPECT_EQ(c.m0_im, -1);
    EXPECT_EQ(c.quadrature.node_count, 10);
    EXPECT_EQ(c.quadrature.max_refinements, 3);
    EXPECT_EQ(c.q_node_count, 12);
    EXPECT_EQ(c.root_find.max_iterations, 40);
    EXPECT_EQ(c.root_find.dedupe_tol, 1e-6);
    EXPECT_EQ(c.seed, 18446744073709551615ull);
    EXPECT_EQ(c.grid_n, 9);
    EXPECT_EQ(c.threads, 2u);
}

TEST(Config, RejectsUnknownAndMistypedKeys)
{
    try
    {
        parse_config(R"({"thetta": 1, "m": 1.5, "quadrature": {"zz": 1}, "seed": -1, "root_find": 3})");
        FAIL() << "expected ConfigError";
    }
    catch (const ConfigError& e)
    {
        EXPECT_EQ(e.problems().size(), 5u);
        EXPECT_TRUE(has_problem(e.problems(), "unknown key 'thetta'"));
        EXPECT_TRUE(has_problem(e.problems(), "m must be an integer"));
        EXPECT_TRUE(has_problem(e.problems(), "unknown key 'quadrature.zz'"));
        EXPECT_TRUE(has_problem(e.problems(), "seed must be >= 0"));
        EXPECT_TRUE(has_problem(e.problems(), "root_find must be an object"));
    }
    EXPECT_THROW(parse_config("{"), ConfigError);
    EXPECT_THROW(parse_config("[1]"), ConfigError);
    EXPECT_THROW(parse_config(R"({"m": 3000000000})"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, ValidationListsEveryProblem)
{
    RunConfig c;
    c.kappa0 = -1;
    c.theta = 2;
    c.kappa01 = 0;
    EXPECT_EQ(validate(c, Command::eval).size(), 3u);

    c = {};
    c.q = 0.5;
    const auto problems = validate(c, Command::eval);
    ASSERT_EQ(problems.size(), 1u);
    EXPECT_EQ(problems[0], "|q| < kappa0 * sin(theta) violated: |q| = 0.5, kappa0 * sin(theta) = "
                               + format_shortest(std::sin(0.2)));

    c = {};
    c.m1_min = 4;
    c.m1_max = 3;
    c.q_node_count = 7;
    const auto map_problems = validate(c, Command::map);
    EXPECT_TRUE(has_problem(map_problems, "m1_min <= m1_max"));
    EXPECT_TRUE(has_problem(map_problems, "q_node_count"));

    c = {};
    c.grid_n = 1;
    c.m = 201;
    EXPECT_EQ(validate(c, Command::field).size(), 2u);

    c = {};
    c.paraxial_factor = 5;
    c.sample_count = 0;
    EXPECT_EQ(validate(c, Command::oracle_check).size(), 2u);

    EXPECT_TRUE(validate(RunConfig{}, Command::map).empty());
    EXPECT_TRUE(validate(RunConfig{}, Command::eval).empty());
}

//---------------------------------------------------------------------------//
// Formatting
//---------------------------------------------------------------------------//

TEST(Format, ShortestRoundTrips)
{
    for_all(601, 5000, [](Gen& g, int) {
        const double v = g.real(-1, 1) * std::pow(10.0, g.integer(-300, 300));
        const std::string s = format_shortest(v);
        double back = 0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        EXPECT_EQ(back, v) << s;
    });
    EXPECT_EQ(format_shortest(0.1), "0.1");
    EXPECT_EQ(format_shortest(1.0), "1");
}

TEST(Format, Significant)
{
    EXPECT_EQ(format_significant(1.0, 9), "1");
    EXPECT_EQ(format_significant(pi, 9), "3.14159265");
    EXPECT_EQ(format_significant(1.23456789012e-7, 9), "1.23456789e-07");
}

//---------------------------------------------------------------------------//
// Commands
//---------------------------------------------------------------------------//

TEST(Commands, EvalDocument)
{
    RunConfig c;
    c.q = 0.05;
    c.m1 = 3;
    c.m2 = 1;
    const CommandResult r = cmd_eval(c);
    ASSERT_EQ(r.exit_code, exit_ok);
    const auto doc = nlohmann::ordered_json::parse(r.output);
    std::vector<std::string> keys;
    for (const auto& [k, v] : doc.items())
        keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"value_re", "value_im", "phase_power", "in_support", "xi", "phi_star",
                                              "phi_tilde_star", "area", "delta1", "delta2"}));
    EXPECT_EQ(doc["phase_power"], -1);
    EXPECT_TRUE(doc["in_support"].get<bool>());
    EXPECT_EQ(doc["value_re"].get<double>(), 0.0);
    EXPECT_NEAR(doc["xi"].get<double>(), std::asin(0.05), 1e-15);

    c.kappa01 = 3;  // outside the stripe
    const auto outside = nlohmann::json::parse(cmd_eval(c).output);
    EXPECT_FALSE(outside["in_support"].get<bool>());
    EXPECT_TRUE(outside["area"].is_null());
    EXPECT_EQ(outside["value_im"].get<double>(), 0.0);

    c.kappa01 = 0.25;
    c.kappa02 = 0.75;
    c.q = 0;
    EXPECT_EQ(cmd_eval(c).exit_code, exit_degenerate);
}

TEST(Commands, FieldValues)
{
    RunConfig c;
    c.m = 0;
    c.kappa0 = 2;
    c.grid_n = 3;
    c.r_max = 1;
    const CommandResult r = cmd_field(c);
    std::istringstream in(r.output);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "r,phi,re,im");
    std::getline(in, line);
    EXPECT_EQ(line, "0,0," + format_shortest(std::sqrt(2 / (2 * pi))) + ",0");
    int rows = 1;
    while (std::getline(in, line))
        ++rows;
    EXPECT_EQ(rows, 9);

    c.m = 1;
    c.kappa0 = 1;
    c.grid_n = 4;
    c.r_max = 3;  // r = 0, 1, 2, 3; phi = 0, pi/2, pi, 3 pi/2
    std::istringstream in1(cmd_field(c).output);
    for (int i = 0; i < 7; ++i)
        std::getline(in1, line);
    std::vector<double> cols;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');)
        cols.push_back(std::stod(cell));
    ASSERT_EQ(cols.size(), 4u);
    EXPECT_EQ(cols[0], 1.0);
    EXPECT_EQ(cols[1], pi / 2);
    EXPECT_NEAR(cols[3], 0.4400505857449335 * std::sqrt(1 / (2 * pi)), 1e-15);
}

TEST(Commands, SingleCellMapIsOne)
{
    const RunConfig c = parse_config(cheap_map);
    const MapOutput out = cmd_map(c, std::string("map.csv"));
    EXPECT_FALSE(out.partial);
    EXPECT_EQ(out.result.output, "m1,m2,intensity\n5,0,1\n");
    EXPECT_NE(out.plot_script.find("'map.csv'"), std::string::npos);
    EXPECT_NE(out.plot_script.find("boxxyerror"), std::string::npos);
}

TEST(Commands, OracleCheckReport)
{
    RunConfig c;
    c.sample_count = 3;
    const CommandResult r = cmd_oracle_check(c);
    EXPECT_EQ(r.exit_code, exit_ok);
    const auto doc = nlohmann::json::parse(r.output);
    EXPECT_EQ(doc["compared"], 3);
    EXPECT_TRUE(doc["passed"].get<bool>());
    EXPECT_LT(doc["dispersion"].get<double>(), 1e-8);
    EXPECT_EQ(doc["samples"].size(), 3u);

    c.dispersion_threshold = 0;
    EXPECT_EQ(cmd_oracle_check(c).exit_code, exit_threshold);
}

//---------------------------------------------------------------------------//
// run() and the executable
//---------------------------------------------------------------------------//

TEST(Run, ExitCodesAndFiles)
{
    Scratch s;
    std::ostringstream err;
    EXPECT_EQ(run(Command::eval, s.write("ok.json", "{}"), s.path("eval.json"), std::nullopt, err), exit_ok);
    EXPECT_TRUE(fs::exists(s.path("eval.json")));

    EXPECT_EQ(run(Command::eval, s.write("bad.json", R"({"q": 1})"), s.path("x.json"), std::nullopt, err),
              exit_invalid_config);
    EXPECT_NE(err.str().find("|q| < kappa0 * sin(theta) violated"), std::string::npos);
    EXPECT_FALSE(fs::exists(s.path("x.json")));

    const std::string unconverged = R"({
      "m1_min": 5, "m1_max": 5, "m2_min": 0, "m2_max": 1,
      "quadrature": {"node_count": 2, "q_node_count": 4, "rel_tol": 1e-15, "abs_tol": 1e-15}
    })";
    EXPECT_EQ(run(Command::map, s.write("tight.json", unconverged), s.path("map.csv"), s.path("map.gp"), err),
              exit_quadrature);
    EXPECT_TRUE(fs::exists(s.path("map.csv.partial")));
    EXPECT_FALSE(fs::exists(s.path("map.csv")));
    EXPECT_FALSE(fs::exists(s.path("map.gp")));

    EXPECT_EQ(run(Command::map, s.write("cheap.json", cheap_map), s.path("c.csv"), s.path("c.gp"), err), exit_ok);
    EXPECT_EQ(slurp(s.path("c.csv")), "m1,m2,intensity\n5,0,1\n");
    EXPECT_TRUE(fs::exists(s.path("c.gp")));
}

TEST(Executable, ExitCodes)
{
    Scratch s;
    const std::string ok = s.write("ok.json", "{}");
    EXPECT_EQ(run_exe("eval --config " + ok + " --out " + s.path("a.json")), 0);
    EXPECT_EQ(run_exe("eval --config " + s.write("bad.json", R"({"nope": 1})") + " --out " + s.path("b.json")), 2);
    EXPECT_EQ(run_exe("eval --config " + s.path("missing.json") + " --out " + s.path("c.json")), 2);
    EXPECT_EQ(run_exe("frobnicate"), 2);
    EXPECT_EQ(run_exe("eval --out " + s.path("d.json")), 2);
    EXPECT_EQ(run_exe("eval --config " + s.write("deg.json", R"({"kappa01": 0.25, "kappa02": 0.75})") + " --out "
                      + s.path("e.json")),
              3);
    EXPECT_EQ(run_exe("oracle-check --config " + s.write("thr.json", R"({"sample_count": 2, "dispersion_threshold": 0})")
                      + " --out " + s.path("f.json")),
              1);
}

TEST(Executable, ByteIdenticalReruns)
{
    Scratch s;
    const std::string field = s.write("field.json", R"({"m": 3, "grid_n": 12})");
    const std::string map = s.write("map.json", cheap_map);
    const std::string oracle = s.write("oracle.json", R"({"sample_count": 4, "seed": 99})");
    for (int i = 0; i < 2; ++i)
    {
        const std::string tag = std::to_string(i);
        ASSERT_EQ(run_exe("field --config " + field + " --out " + s.path("field" + tag + ".csv")), 0);
        ASSERT_EQ(run_exe("map --config " + map + " --out " + s.path("map" + tag + ".csv") + " --plot "
                          + s.path("map" + tag + ".gp")),
                  0);
        ASSERT_EQ(run_exe("oracle-check --config " + oracle + " --out " + s.path("oracle" + tag + ".json")), 0);
    }
    for (const char* name : {"field", "map", "oracle"})
    {
        const std::string ext = std::string(name) == "oracle" ? ".json" : ".csv";
        const std::string a = slurp(s.path(name + std::string("0") + ext));
        EXPECT_FALSE(a.empty());
        EXPECT_EQ(a, slurp(s.path(name + std::string("1") + ext))) << name;
    }
}
