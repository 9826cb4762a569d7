#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lab/experiments.hpp"
#include "lab/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for random conformal structures"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool render = false;

  std::string chosen;
  for (const std::string& name : lab::experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--out", out_dir, "directory for report files");
    sub->add_flag("--render", render, "also write SVG figures");
    sub->callback([&chosen, name] { chosen = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    lab::json cfg = lab::json::object();
    if (!config_path.empty()) cfg = lab::load_json_file(config_path);
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed") > 0) cfg["seed"] = seed;
    lab::Report report =
        lab::run_experiment(chosen, cfg, render ? out_dir : "");
    lab::write_report_files(report, out_dir);
    std::cout << report.text();
    return report.passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
