// aptlab: config-driven experiment runner.
//
//   aptlab run <config.json> [--seed N] [--out DIR]
//   aptlab run --preset figure-1
//   aptlab list-presets
//   aptlab show-preset <name>
//
// exit codes: 0 ok, 2 invalid config, 3 numerical failure, 1 anything else

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "aptlab/errors.hpp"
#include "aptlab/runner.hpp"

namespace {

nlohmann::json load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw aptlab::ValidationError("cannot open config " + path);
  try {
    return nlohmann::json::parse(is, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw aptlab::ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aptlab - inhomogeneous Markov chains against their limit processes"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_dir, show_name;
  std::optional<std::uint64_t> seed;

  auto* run = app.add_subcommand("run", "run an experiment from a JSON config or a preset");
  run->add_option("config", config_path, "config file");
  run->add_option("--preset", preset_name, "built-in preset instead of a file");
  run->add_option("--seed", seed, "override the seed");
  run->add_option("--out", out_dir, "output directory (default out/<id>)");

  auto* list = app.add_subcommand("list-presets", "print the built-in presets");
  auto* show = app.add_subcommand("show-preset", "print a preset's config as JSON");
  show->add_option("name", show_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*list) {
      std::cout << aptlab::runner::list_presets();
      return 0;
    }
    if (*show) {
      std::cout << aptlab::runner::preset(show_name).config.dump(2) << "\n";
      return 0;
    }
    if (config_path.empty() == preset_name.empty()) {
      throw aptlab::ValidationError("run: give exactly one of a config file or --preset");
    }
    nlohmann::json cfg = preset_name.empty() ? load(config_path) : aptlab::runner::preset(preset_name).config;
    if (seed) cfg["seed"] = *seed;
    if (out_dir.empty()) {
      const std::string id = cfg.value("id", cfg.value("experiment", std::string("run")));
      out_dir = "out/" + id;
    }
    const auto summary = aptlab::runner::run_experiment(cfg, out_dir);
    std::cout << summary["experiment"].get<std::string>() << ": " << (summary["pass"].get<bool>() ? "PASS" : "FAIL")
              << " (" << out_dir << "/summary.json)\n";
    return 0;
  } catch (const aptlab::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const aptlab::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 2;
  } catch (const aptlab::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
