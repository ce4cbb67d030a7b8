// contact-amr: runs the half-disk contact benchmark suites.
//
//   contact-amr run <config-file> [--set key=value ...] [--out DIR]
//   contact-amr modes
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure, 1 anything else.

#include <CLI11.hpp>

#include <iostream>

#include "camr/bench/run.hpp"
#include "camr/simd/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adaptive refinement benchmark for two-body frictionless contact"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "run one benchmark configuration");
  run->add_option("config", config_path, "key = value configuration file")->required();
  run->add_option("--set", overrides, "override one setting, key=value (repeatable)");
  run->add_option("--out", out_dir, "output directory (overrides out_dir)");
  run->add_flag("-q,--quiet", quiet, "no progress output");

  auto* modes = app.add_subcommand("modes", "list run modes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*modes) {
    for (camr::RunMode m : camr::all_modes()) std::cout << camr::to_string(m) << "\t" << camr::describe(m) << '\n';
    return 0;
  }

  camr::BenchConfig config;
  try {
    if (!out_dir.empty()) overrides.push_back("out_dir=" + out_dir);
    config = camr::load_config(config_path, overrides);
  } catch (const camr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  std::ostream null_stream(nullptr);
  std::ostream& log = quiet ? null_stream : std::cout;
  log << "kernels: " << camr::simd::isa_name(camr::simd::active_isa()) << '\n';
  try {
    camr::run_bench(config, log);
  } catch (const camr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const camr::Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
