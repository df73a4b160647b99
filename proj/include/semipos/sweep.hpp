#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "semipos/config.hpp"
#include "semipos/energy.hpp"

namespace semipos {

struct SweepRow {
  double a = 0.0;
  double level = 0.0;
  double norm_h2 = 0.0;
  /// max_{r >= 1} |u_a|
  double sup_ext = 0.0;
  double sup_norm = 0.0;
  double min_value = 0.0;
  /// int (u_a)_- dx
  double neg_mass = 0.0;
  double decay_fit = 0.0;
  double decay_pred = 0.0;
  double residual = 0.0;
  double rel_residual = 0.0;
  bool converged = false;
  int iterations = 0;
  /// max_{r >= 1} |u_a - u_0|; empty when the positone row is missing.
  std::optional<double> limit_sup_distance;
  /// |level - (norm_h2^2/2 - N_a(u))|
  double identity_gap = 0.0;
  std::string status;
};

struct SweepSummary {
  std::optional<double> a1;
  std::optional<double> beta;
  std::optional<double> rho;
  /// Largest a such that every row from the positone limit up to a has
  /// norm_h2 within 25% of the positone norm.
  std::optional<double> a2_window;
  /// Largest a such that every row up to a is nonnegative (min u >=
  /// -1e-8 ||u||_inf), clipped to the a2 window.
  std::optional<double> a3_estimate;
  std::optional<double> beta1;
  std::size_t rows = 0;
  std::size_t converged_rows = 0;

  bool operator==(const SweepSummary&) const = default;
};

struct SweepReport {
  Config config;
  std::optional<GeometryConstants> geometry;
  /// Sorted by decreasing a; the positone row (a = 0) comes last.
  std::vector<SweepRow> rows;
  /// u_a on the grid, one per row.
  std::vector<std::vector<double>> profiles;
  std::vector<double> radii;
  SweepSummary summary;
};

inline constexpr double kPositivityTol = 1e-8;
inline constexpr double kNormBand = 0.25;

/// The a values a sweep would run for the given a1 (positone row excluded).
std::vector<double> sweep_a_values(const Config& config, double a1);

/// Solve for every a of the sweep plus the positone limit a = 0, warm
/// starting each solve from the previous one when enabled. Failed rows are
/// flagged and the sweep continues.
SweepReport run_sweep(const Config& config,
                      const std::function<void(const std::string&)>& log = {});

/// Fill summary fields from rows.
SweepSummary summarize(const std::vector<SweepRow>& rows,
                       const std::optional<GeometryConstants>& geometry);

nlohmann::json to_json(const SweepSummary& summary);
SweepSummary summary_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GeometryConstants& g);

inline constexpr const char* kCsvHeader =
    "a,level,norm_h2,sup_ext,min_value,neg_mass,decay_fit,decay_pred,residual,converged";

/// Write sweep.csv, summary.json and profiles/u_<k>.csv under `dir`.
/// Throws std::runtime_error when the directory is not writable.
void emit(const SweepReport& report, const std::string& dir);

}  // namespace semipos
