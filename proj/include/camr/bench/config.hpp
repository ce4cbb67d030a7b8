#pragma once

#include <utility>
#include <string>
#include <vector>

#include "camr/bench/hertz.hpp"

namespace camr {

enum class RunMode { Amr1, Amr2, Uniform, PenaltySweep, Convergence };

std::string to_string(RunMode mode);
/// Accepts the names printed by to_string, case-insensitively.
RunMode parse_mode(const std::string& name);
const std::vector<RunMode>& all_modes();
std::string describe(RunMode mode);

struct BenchConfig {
  RunMode mode = RunMode::Amr1;
  HertzParams hertz;
  AmrConfig amr;

  // UNIFORM
  int order = 1;
  int uniform_levels = 2;

  // PENALTY_SWEEP: k_N = factor * E on a fixed mesh, then interpenetration / h
  // over successive uniform levels at sweep_reference_factor.
  std::vector<double> penalty_factors{1.0, 10.0, 1e2, 1e4, 1e6};
  int sweep_level = 2;
  std::vector<int> sweep_levels{1, 2, 3};
  double sweep_reference_factor = 1e4;
  double slope_min_factor = 1e2;
  double slope_max_factor = 1e6;

  // CONVERGENCE
  std::vector<int> q1_levels{1, 2, 3, 4};
  std::vector<int> q2_levels{1, 2};
  int reference_order = 2;
  int reference_level = 4;
  bool convergence_amr = true;

  // Optional Hertz law to compare pressure profiles against (0 = none).
  double reference_a = 0.0;
  double reference_p_o = 0.0;

  bool write_vtk = true;
  std::string out_dir = "out";

  void validate() const;
};

/// Parses "key = value" lines in file order; '#' starts a comment. Throws ConfigError.
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);

/// Applies one setting. Unknown keys and malformed values throw ConfigError.
void apply_setting(BenchConfig& config, const std::string& key, const std::string& value);

/// Reads a config file, then applies "key=value" overrides in order.
BenchConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

BenchConfig config_from_text(const std::string& text, const std::vector<std::string>& overrides = {});

/// Every accepted key with its current value, one "key = value" per line.
std::string dump(const BenchConfig& config);

}  // namespace camr
