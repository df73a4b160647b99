#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace semipos {

/// (N-1)-dimensional measure of the unit sphere in R^N: N pi^{N/2} / Gamma(1 + N/2).
double sphere_area(int dim);

/// Uniform radial grid on [0, r_max] for radial functions on R^N.
///
/// The grid is an immutable, shared handle: copies are cheap and refer to
/// the same node data. Trapezoid weights already include the volume factor
/// sphere_area * r^{N-1}, so `integrate` is a plain dot product.
class RadialGrid {
 public:
  RadialGrid(int dim, int n, double r_max);

  int dim() const noexcept { return data_->dim; }
  int size() const noexcept { return static_cast<int>(data_->r.size()); }
  double r_max() const noexcept { return data_->r_max; }
  double spacing() const noexcept { return data_->h; }
  double sphere_area() const noexcept { return data_->omega; }
  double r(int i) const { return data_->r[static_cast<std::size_t>(i)]; }
  std::span<const double> nodes() const noexcept { return data_->r; }
  /// Volume quadrature weights omega_N r_j^{N-1} w_j (composite trapezoid).
  std::span<const double> volume_weights() const noexcept { return data_->vol_w; }

  bool same_as(const RadialGrid& other) const noexcept;

 private:
  struct Data {
    int dim;
    double r_max;
    double h;
    double omega;
    std::vector<double> r;
    std::vector<double> vol_w;
  };
  std::shared_ptr<const Data> data_;
};

bool operator==(const RadialGrid& a, const RadialGrid& b) noexcept;

/// Build a grid; throws InvalidArgument for dim < 5, n < 16 or r_max <= 0.
RadialGrid make_grid(int dim, int n, double r_max);

/// Values of a radial function at the nodes of a grid.
class RadialField {
 public:
  explicit RadialField(RadialGrid grid);
  RadialField(RadialGrid grid, std::vector<double> values);

  /// Sample `f(r)` at every node.
  static RadialField from_function(const RadialGrid& grid, const std::function<double(double)>& f);

  const RadialGrid& grid() const noexcept { return grid_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return values_[static_cast<std::size_t>(i)]; }

  double max_abs() const noexcept;
  double min() const noexcept;
  double max() const noexcept;

  RadialField& operator+=(const RadialField& other);
  RadialField& operator-=(const RadialField& other);
  RadialField& operator*=(double s) noexcept;
  /// this += s * other
  RadialField& axpy(double s, const RadialField& other);

 private:
  RadialGrid grid_;
  std::vector<double> values_;
};

RadialField operator+(RadialField a, const RadialField& b);
RadialField operator-(RadialField a, const RadialField& b);
RadialField operator*(double s, RadialField a);
/// Pointwise product.
RadialField hadamard(const RadialField& a, const RadialField& b);

/// Throws InvalidArgument unless both fields live on the same grid.
void require_same_grid(const RadialField& a, const RadialField& b, const char* where);

/// Radial Laplacian u'' + (N-1)/r u' by second-order differences.
/// At r = 0 the regularity limit N u''(0) is used, with u''(0) taken from
/// the even fit u0 + c r^2 + d r^4 through the first three nodes. The last
/// node uses one-sided second-order stencils.
RadialField laplacian(const RadialField& u);

/// omega_N * int_0^{r_max} u(r) r^{N-1} dr by composite trapezoid.
double integrate(const RadialField& u);

/// int (Lap u)(Lap v) dx with the finite-difference Laplacian.
double h2_inner(const RadialField& u, const RadialField& v);

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// (int |u|^p dx)^{1/p}; p = kInfNorm gives max |u|. Throws for p < 1.
double lp_norm(const RadialField& u, double p);
/// (int w |u|^p dx)^{1/p} with a nonnegative weight field. For p = kInfNorm
/// the max is taken over nodes where w > 0.
double lp_norm(const RadialField& u, double p, const RadialField& weight);

}  // namespace semipos
