#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semipos/energy.hpp"

namespace semipos {

enum class BumpKind { Gaussian, PolynomialBump };

/// Parse "gaussian" / "polynomial_bump".
BumpKind parse_bump_kind(const std::string& name);
std::string to_string(BumpKind kind);

struct MPConfig {
  /// K + 1 path nodes, K >= 8.
  int path_nodes = 17;
  /// Convergence on ||Lap(u - T u)||_2 <= tol_res ||Lap u||_2.
  double tol_res = 1e-4;
  int max_iter = 5000;
  BumpKind bump = BumpKind::Gaussian;
  /// Finish with Newton steps on the fixed-point system once the relative
  /// residual drops below 1e-2.
  bool newton_polish = true;
  /// Iterations without residual progress before giving up.
  int stagnation_window = 50;
  double armijo = 1e-4;
};

struct MPPath {
  std::vector<Potential> nodes;
  std::vector<double> levels;
};

struct IterateRecord {
  double level = 0.0;
  double norm_h2 = 0.0;
  double residual = 0.0;
};

struct CeramiReport {
  bool bounded_norms = false;
  bool product_decay = false;
  double max_norm = 0.0;
  double final_product = 0.0;
};

struct MPSolution {
  explicit MPSolution(const RadialGrid& grid)
      : u{RadialField(grid), RadialField(grid)}, vtilde{RadialField(grid), RadialField(grid)} {}

  Potential u;
  double level = 0.0;
  /// ||Lap(u - T u)||_2
  double residual = 0.0;
  double rel_residual = 0.0;
  double norm_h2 = 0.0;
  double a = 0.0;
  int iterations = 0;
  bool converged = false;
  bool newton_used = false;
  /// level >= beta - 1e-6
  bool rim_ok = false;
  CeramiReport cerami;
  Potential vtilde;
  /// ||Lap vtilde||_2
  double t_vtilde = 0.0;
  MPPath path;
  std::vector<IterateRecord> history;
  std::vector<std::string> warnings;
  std::string status;
};

/// Nonnegative bump phi with ||Lap phi||_2 = 1: the potential of g times a
/// smooth profile centred on the weight support.
Potential make_bump(const Model& model, BumpKind kind);

/// Double t from `t_start` (default 2 rho) until I_a(t phi) < 0 and return
/// t phi. Throws NumericalError past 2^30 rho, which points at a failure of
/// superlinear growth.
Potential find_vtilde(const Model& model, const ShiftedNonlinearity& shifted, const Potential& bump,
                      double rho, std::optional<double> t_start = std::nullopt);

/// Numerical mountain pass from 0 to vtilde. With `warm_start` the initial
/// path runs 0 -> warm_start -> vtilde.
MPSolution mp_solve(const Model& model, const ShiftedNonlinearity& shifted,
                    const GeometryConstants& geometry, const MPConfig& config = {},
                    const std::optional<Potential>& warm_start = std::nullopt);

/// Observational Cerami-type check on an iterate history (at least 10
/// entries): norms stay bounded while residual * norm decays.
CeramiReport cerami_diagnostics(const std::vector<IterateRecord>& history);

}  // namespace semipos
