#include <cstdlib>
#include <fstream>
#include <sstream>

#include <lgtsim/experiments.hpp>

#include "common.hpp"

using namespace lgtsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lgtsim_unit_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* small_quench =
    "experiment = ahm-quench\n"
    "d = 2\n"
    "lambda_E = 1.0\n"
    "lambda_B = 0.5\n"
    "lambda_M = 0.5\n"
    "lambda_J = 0.5\n"
    "dt = 0.1\n"
    "steps = 3\n"
    "backend = both\n"
    "output = q.csv\n";

}  // namespace

TEST(Config, ExpressionEvaluation) {
  EXPECT_NEAR(eval_expression("4*pi/9"), 4 * pi / 9, 1e-15);
  EXPECT_NEAR(eval_expression(" 2 + 3*4 "), 14.0, 0);
  EXPECT_NEAR(eval_expression("(2+3)*4"), 20.0, 0);
  EXPECT_NEAR(eval_expression("-(1 - 3)/4"), 0.5, 0);
  EXPECT_NEAR(eval_expression("1e-3"), 1e-3, 0);
  EXPECT_NEAR(eval_expression("4/55"), 4.0 / 55.0, 1e-17);
  for (const char* bad : {"", "1/0", "(1+2", "2 3", "abc", "1+"}) EXPECT_THROW(eval_expression(bad), invalid_parameter) << bad;
}

TEST(Config, ParsingCommentsAndOverrides) {
  const Config c = parse_config("# header\nd = 3   # trailing\n\nd = 4\nname = hello world\n");
  EXPECT_EQ(c.integer("d"), 4);
  EXPECT_EQ(c.str("name"), "hello world");
  EXPECT_EQ(c.integer("missing", 7), 7);
  EXPECT_THROW(c.str("missing"), invalid_parameter);
  EXPECT_THROW(parse_config("no equals sign"), invalid_parameter);
  EXPECT_THROW(parse_config(" = 3"), invalid_parameter);
}

TEST(Config, TypedAccessors) {
  const Config c = parse_config("a = 2.5\nb = 3\nl = 3, 4,5\nbad = 1, x\n");
  EXPECT_THROW(c.integer("a"), invalid_parameter);
  EXPECT_EQ(c.integer("b"), 3);
  EXPECT_EQ(c.int_list("l"), (std::vector<int>{3, 4, 5}));
  EXPECT_THROW(c.list("bad"), invalid_parameter);
}

TEST(Config, PresetIncludeAndOverride) {
  const Config c = parse_config("@include preset:fig4\nsteps = 10\n");
  EXPECT_EQ(c.str("experiment"), "ahm-quench");
  EXPECT_EQ(c.integer("steps"), 10);
  EXPECT_NEAR(c.num("dt"), 4.0 / 55.0, 1e-15);
  EXPECT_THROW(parse_config("@include preset:nope\n"), invalid_parameter);
  for (const auto& [name, text] : builtin_presets()) EXPECT_NO_THROW(validate_config(parse_config(text))) << name;
}

TEST(Config, FileIncludeIsRelativeToTheIncludingFile) {
  const fs::path dir = scratch_dir("include");
  fs::create_directories(dir / "sub");
  std::ofstream(dir / "sub" / "base.cfg") << "experiment = resources\nchain_N = 4\n";
  std::ofstream(dir / "top.cfg") << "@include sub/base.cfg\nchain_N = 6\n";
  const Config c = load_config(dir / "top.cfg");
  EXPECT_EQ(c.str("experiment"), "resources");
  EXPECT_EQ(c.integer("chain_N"), 6);
  std::ofstream(dir / "loop.cfg") << "@include loop.cfg\n";
  EXPECT_THROW(load_config(dir / "loop.cfg"), invalid_parameter);
  EXPECT_THROW(load_config(dir / "absent.cfg"), invalid_parameter);
  fs::remove_all(dir);
}

TEST(Config, ValidationRejectsBadInput) {
  auto bad = [](const std::string& text) { return parse_config(text); };
  EXPECT_THROW(validate_config(bad("experiment = warp-drive\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("d = 3\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("experiment = ahm-quench\nmystery = 1\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("experiment = ahm-quench\nd = 1\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("experiment = ahm-quench\ndt = -0.1\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("experiment = ahm-quench\norder = 3\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("experiment = ahm-quench\nbackend = analog\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("experiment = ahm-quench\nlambda_E = one\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("experiment = d-scaling\nd_list = 3, 9\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("experiment = resources\nchain_N = 5\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("experiment = resources\ngate_fidelity = 1.2\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("experiment = baryon-prep\nN = 8\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("experiment = hadronic-tensor\nmu_index = 2\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("experiment = hadronic-tensor\nwindow = gauss\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("experiment = hadronic-tensor\nmomentum = 2\n")), invalid_parameter);
  EXPECT_THROW(validate_config(bad("experiment = resources\nseed = -1\n")), invalid_parameter);
  EXPECT_NO_THROW(validate_config(bad(small_quench)));
}

TEST(Config, ThreadsFromEnvironment) {
  ::unsetenv("LGTSIM_THREADS");
  EXPECT_EQ(threads_from_env(), 1);
  ::setenv("LGTSIM_THREADS", "3", 1);
  EXPECT_EQ(threads_from_env(), 3);
  ::setenv("LGTSIM_THREADS", "0", 1);
  EXPECT_THROW(threads_from_env(), invalid_parameter);
  ::unsetenv("LGTSIM_THREADS");
}

TEST(Experiments, ResourcesReport) {
  const nlohmann::json j = resources_report(parse_config(builtin_presets().at("resources-ahm")));
  EXPECT_EQ(j["format"], "lgtsim-resources");
  EXPECT_EQ(j["chain_first_order_step"]["controlled"], 16);
  EXPECT_EQ(j["pulse_estimate"]["8"], 84);
  const real total = j["projection"]["chain_step_fidelity_total_count"];
  const real depth = j["projection"]["chain_step_fidelity_depth_count"];
  EXPECT_GT(total, 0.0);
  EXPECT_LE(total, depth);
}

TEST(Experiments, QuenchRunIsReproducible) {
  const fs::path dir = scratch_dir("quench");
  const Config cfg = parse_config(small_quench);
  RunContext ctx;
  ctx.out_dir = dir;
  const auto paths = run_experiment(cfg, ctx);
  ASSERT_EQ(paths.size(), 1u);
  const std::string first = slurp(paths[0]);
  EXPECT_NE(first.find("backend,t,electric,magnetic,mass,star,gauge,matter,total"), std::string::npos);
  int rows = 0;
  std::stringstream ss(first);
  std::string line;
  while (std::getline(ss, line))
    if (line.rfind("exact,", 0) == 0 || line.rfind("trotter,", 0) == 0) ++rows;
  EXPECT_EQ(rows, 2 * 4);
  run_experiment(cfg, ctx);
  EXPECT_EQ(slurp(paths[0]), first);
  fs::remove_all(dir);
}

TEST(Experiments, ResourcesRunWritesJson) {
  const fs::path dir = scratch_dir("resources");
  RunContext ctx;
  ctx.out_dir = dir;
  const auto paths = run_experiment(parse_config("@include preset:resources-ahm\nchain_N = 4\n"), ctx);
  ASSERT_EQ(paths.size(), 1u);
  const auto j = nlohmann::json::parse(slurp(paths[0]));
  EXPECT_EQ(j["chain_first_order_step"]["N"], 4);
  EXPECT_EQ(j["chain_first_order_step"]["controlled"], 8);
  fs::remove_all(dir);
}
