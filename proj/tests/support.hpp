#pragma once

// Shared fixtures and hand-rolled generators for the unit tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "semipos/energy.hpp"
#include "semipos/radial.hpp"
#include "semipos/weight.hpp"

namespace semipos::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

/// Sum of 1-4 Gaussian bumps with random centres, widths and signs, cut off
/// well inside the grid. With `nonneg` all amplitudes are positive.
inline RadialField random_field(const RadialGrid& grid, Rng& rng, bool nonneg = false) {
  const int terms = 1 + static_cast<int>(rng() % 4);
  std::vector<double> amp, ctr, wid;
  for (int k = 0; k < terms; ++k) {
    double a = uniform(rng, 0.2, 2.0);
    if (!nonneg && rng() % 2) a = -a;
    amp.push_back(a);
    ctr.push_back(uniform(rng, 0.0, 0.3 * grid.r_max()));
    wid.push_back(uniform(rng, 0.05, 0.15) * grid.r_max());
  }
  return RadialField::from_function(grid, [&](double r) {
    double v = 0.0;
    for (int k = 0; k < terms; ++k) {
      const double x = (r - ctr[k]) / wid[k];
      v += amp[k] * std::exp(-x * x);
    }
    return v;
  });
}

/// Random support coordinates with entries in [lo, hi].
inline Eigen::VectorXd random_coords(int size, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Eigen::VectorXd c(size);
  for (int i = 0; i < size; ++i) c(i) = uniform(rng, lo, hi);
  return c;
}

inline WeightSpec example_weight(int dim = 5) { return WeightSpec::example(dim, 1.0, 0.5, 0.9); }

/// Example weight on the default grid (N = 5, n = 512, r_max = 20), built once.
inline const Model& default_model() {
  static const Model model(make_grid(5, 512, 20.0), example_weight());
  return model;
}

inline const Model& coarse_model() {
  static const Model model(make_grid(5, 128, 20.0), example_weight());
  return model;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace semipos::testing
