#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "semipos/mountain_pass.hpp"
#include "semipos/nonlinearity.hpp"
#include "semipos/weight.hpp"

namespace semipos {

/// Run configuration. Parsed from an INI file: top-level `dim`, then the
/// sections [grid], [nonlinearity], [weight], [mp], [sweep], [kernel] and
/// [output]. Every key is optional; unknown keys are rejected.
struct Config {
  int dim = 5;

  struct Grid {
    int n = 512;
    double r_max = 20.0;
  } grid;

  struct Nonlinearity {
    /// paper_example | power | log_power
    std::string family = "paper_example";
    double gamma = 2.5;
    double c_f = 1.0;
    double r_mono = 1.0;
    /// coef * t^power (power) or coef * t^power * ln(1 + t) (log_power).
    double coef = 1.0;
    double power = 1.5;
    /// Envelope eps for the geometry; default is half of 1/B_g.
    std::optional<double> eps;
  } nonlinearity;

  struct Weight {
    /// paper_example | custom_table
    std::string family = "paper_example";
    double d = 1.0;
    double r_in = 0.5;
    double r_out = 0.9;
    /// Two-column (r, g) file for custom_table.
    std::string table;
    /// Check (g2) on R^N \ {0} with delta = 1 as well.
    bool g2a = false;
  } weight;

  MPConfig mp;

  struct Sweep {
    /// Explicit a values; empty means `count` geometric values from a1/2.
    std::vector<double> a_list;
    int count = 12;
    double ratio = 0.5;
    bool warm_start = true;
    std::uint64_t seed = 1;
  } sweep;

  std::string kernel_cache_dir;
  std::string output_dir = "semipos_out";
};

/// Parse and validate; throws ConfigError naming the offending key.
Config parse_config(const std::string& path);
Config parse_config_string(const std::string& text);

/// Check cross-field constraints (dimension, gamma range, radii, ...).
void validate(const Config& config);

nlohmann::json to_json(const Config& config);

NonlinearitySpec make_nonlinearity(const Config& config);
WeightSpec make_weight(const Config& config);

}  // namespace semipos
