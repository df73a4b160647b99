#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "semipos/radial.hpp"

namespace semipos {

struct WeightNorms {
  double l1 = 0.0;
  double linf = 0.0;
  /// ||g||_{N/4}
  double l_n4 = 0.0;
  /// ||g||_{(2**)'} with (2**)' = 2N/(N+4)
  double l_dual = 0.0;
};

/// Radial weight g >= 0 with compact support [r_lo, r_hi].
class WeightSpec {
 public:
  /// chi_A |y|^{-d} on the annulus A = {r_in <= |y| <= r_out}; requires
  /// 1/2 <= r_in < r_out <= 1 and d > 0. Norms in closed form.
  static WeightSpec example(int dim, double d, double r_in, double r_out);
  /// Piecewise-linear profile through (r, g) samples, zero outside the
  /// table range. Radii strictly increasing, values >= 0.
  static WeightSpec custom_table(int dim, std::vector<std::pair<double, double>> table);
  /// Table file with two whitespace- or comma-separated columns.
  static WeightSpec from_table_file(int dim, const std::string& path);
  /// g = 0 on a nominal support; used for degenerate cases.
  static WeightSpec zero(int dim);

  const std::string& family() const noexcept { return family_; }
  int dim() const noexcept { return dim_; }
  double d() const noexcept { return d_; }
  double r_in() const noexcept { return r_lo_; }
  double r_out() const noexcept { return r_hi_; }
  const WeightNorms& norms() const noexcept { return norms_; }
  bool is_zero() const noexcept { return norms_.linf == 0.0; }

  double operator()(double r) const;

  /// c * g.
  WeightSpec scaled(double c) const;

  /// Sample onto a grid by cell averages: node j gets the mean of g over
  /// its trapezoid cell with respect to r^{N-1} dr, so integrate(sample) =
  /// ||g||_1 whenever the support lies inside the grid.
  RadialField sample(const RadialGrid& grid) const;

  /// ||g||_p by quadrature over the support (p = kInfNorm allowed).
  double lp_norm_quadrature(double p) const;

 private:
  WeightSpec(std::string family, int dim, std::function<double(double)> profile, double r_lo,
             double r_hi, double d);

  std::string family_;
  int dim_;
  std::function<double(double)> profile_;
  double r_lo_;
  double r_hi_;
  double d_;
  std::vector<double> breaks_;
  WeightNorms norms_;
};

struct G1Report {
  WeightNorms norms;
  bool passed = false;
  std::vector<std::string> warnings;
};

/// Finite L^1, L^inf, L^{N/4} and L^{(2**)'} norms by radial quadrature.
G1Report check_g1(const WeightSpec& spec);

struct G2Report {
  double delta = 0.0;
  double alpha = 0.0;
  /// sup of the left side over the samples; +inf on failure.
  double c_g = 0.0;
  bool passed = false;
  /// int g^delta dy, the |x| -> infinity limit of the left side.
  double limit = 0.0;
  std::vector<std::pair<double, double>> samples;
  std::string detail;
};

/// Left side |x|^{(N-4)delta} int g(y)^delta |x - y|^{-(N-4)delta} dy at
/// each sample radius, with delta in {1, 2N/(N-4)}. With `punctured` set
/// (delta = 1 only) samples may lie anywhere in (0, inf).
G2Report check_g2(const WeightSpec& spec, double delta, const std::vector<double>& x_samples,
                  bool punctured = false);

/// Logarithmic sample of |x| in [1, 1e3].
std::vector<double> default_g2_samples();

}  // namespace semipos
