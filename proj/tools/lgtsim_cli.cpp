#include <iostream>

#include <CLI11.hpp>

#include <lgtsim/experiments.hpp>

namespace {

constexpr int exit_invalid = 2;
constexpr int exit_numeric = 3;

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const lgtsim::invalid_parameter& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return exit_invalid;
  } catch (const lgtsim::unsupported_feature& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return exit_invalid;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return exit_numeric;
  }
}

void report(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) std::cout << "wrote " << p.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lgtsim: digitized lattice gauge theory simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory");

  std::string preset_name, preset_out = ".";
  auto* preset = app.add_subcommand("preset", "Run a built-in preset");
  preset->add_option("name", preset_name, "Preset name")->required();
  preset->add_option("--out", preset_out, "Output directory");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse and check a config file without running it");
  validate->add_option("config", validate_path, "Config file")->required();

  app.add_subcommand("presets", "List the built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_invalid;
  }

  lgtsim::RunContext ctx;
  ctx.log = &std::cerr;
  if (*run)
    return guarded([&] {
      ctx.threads = lgtsim::threads_from_env();
      ctx.out_dir = out_dir;
      report(lgtsim::run_experiment(lgtsim::load_config(config_path), ctx));
    });
  if (*preset)
    return guarded([&] {
      ctx.threads = lgtsim::threads_from_env();
      ctx.out_dir = preset_out;
      const auto cfg = lgtsim::parse_config("@include preset:" + preset_name + "\n");
      report(lgtsim::run_experiment(cfg, ctx));
    });
  if (*validate)
    return guarded([&] {
      const auto cfg = lgtsim::load_config(validate_path);
      lgtsim::validate_config(cfg);
      std::cout << "ok: " << cfg.str("experiment") << "\n";
    });
  for (const auto& [name, text] : lgtsim::builtin_presets()) std::cout << name << "\n";
  return 0;
}
