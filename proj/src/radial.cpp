#include "semipos/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "semipos/error.hpp"

namespace semipos {

double sphere_area(int dim) {
  if (dim < 1) throw InvalidArgument("sphere_area: dimension must be positive");
  const double n = dim;
  return n * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(1.0 + 0.5 * n);
}

RadialGrid::RadialGrid(int dim, int n, double r_max) {
  if (dim < 5) {
    throw InvalidArgument("make_grid: dimension below 5 (got " + std::to_string(dim) + ")");
  }
  if (n < 16) throw InvalidArgument("make_grid: need at least 16 nodes");
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw InvalidArgument("make_grid: r_max must be positive and finite");
  }
  Data d;
  d.dim = dim;
  d.r_max = r_max;
  d.h = r_max / (n - 1);
  d.omega = semipos::sphere_area(dim);
  d.r.resize(n);
  d.vol_w.resize(n);
  for (int i = 0; i < n; ++i) {
    d.r[i] = (i == n - 1) ? r_max : i * d.h;
    const double trap = (i == 0 || i == n - 1) ? 0.5 * d.h : d.h;
    d.vol_w[i] = d.omega * std::pow(d.r[i], dim - 1) * trap;
  }
  data_ = std::make_shared<const Data>(std::move(d));
}

bool RadialGrid::same_as(const RadialGrid& other) const noexcept {
  if (data_ == other.data_) return true;
  return dim() == other.dim() && size() == other.size() && r_max() == other.r_max();
}

bool operator==(const RadialGrid& a, const RadialGrid& b) noexcept { return a.same_as(b); }

RadialGrid make_grid(int dim, int n, double r_max) { return RadialGrid(dim, n, r_max); }

RadialField::RadialField(RadialGrid grid)
    : grid_(std::move(grid)), values_(static_cast<std::size_t>(grid_.size()), 0.0) {}

RadialField::RadialField(RadialGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.size()) {
    throw InvalidArgument("RadialField: value count does not match grid size");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("RadialField: non-finite value");
  }
}

RadialField RadialField::from_function(const RadialGrid& grid,
                                       const std::function<double(double)>& f) {
  std::vector<double> values(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i < grid.size(); ++i) values[i] = f(grid.r(i));
  return RadialField(grid, std::move(values));
}

double RadialField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double RadialField::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

double RadialField::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

RadialField& RadialField::operator+=(const RadialField& other) { return axpy(1.0, other); }

RadialField& RadialField::operator-=(const RadialField& other) { return axpy(-1.0, other); }

RadialField& RadialField::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

RadialField& RadialField::axpy(double s, const RadialField& other) {
  require_same_grid(*this, other, "RadialField arithmetic");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * other.values_[i];
  return *this;
}

RadialField operator+(RadialField a, const RadialField& b) { return a += b; }
RadialField operator-(RadialField a, const RadialField& b) { return a -= b; }
RadialField operator*(double s, RadialField a) { return a *= s; }

RadialField hadamard(const RadialField& a, const RadialField& b) {
  require_same_grid(a, b, "hadamard");
  RadialField out(a.grid());
  for (int i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

void require_same_grid(const RadialField& a, const RadialField& b, const char* where) {
  if (!a.grid().same_as(b.grid())) throw InvalidArgument(std::string(where) + ": grid mismatch");
}

RadialField laplacian(const RadialField& u) {
  const RadialGrid& g = u.grid();
  const int n = g.size();
  const int dim = g.dim();
  const double h = g.spacing();
  const double h2 = h * h;
  RadialField out(g);

  // Even fit u(r) = u0 + c r^2 + d r^4 through r = 0, h, 2h.
  const double c = (16.0 * (u[1] - u[0]) - (u[2] - u[0])) / (12.0 * h2);
  out[0] = dim * 2.0 * c;

  for (int i = 1; i < n - 1; ++i) {
    const double d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
    const double d1 = (u[i + 1] - u[i - 1]) / (2.0 * h);
    out[i] = d2 + (dim - 1) / g.r(i) * d1;
  }

  const int e = n - 1;
  const double d2 = (2.0 * u[e] - 5.0 * u[e - 1] + 4.0 * u[e - 2] - u[e - 3]) / h2;
  const double d1 = (3.0 * u[e] - 4.0 * u[e - 1] + u[e - 2]) / (2.0 * h);
  out[e] = d2 + (dim - 1) / g.r(e) * d1;
  return out;
}

double integrate(const RadialField& u) {
  const auto w = u.grid().volume_weights();
  double sum = 0.0;
  for (int i = 0; i < u.size(); ++i) sum += w[i] * u[i];
  return sum;
}

double h2_inner(const RadialField& u, const RadialField& v) {
  require_same_grid(u, v, "h2_inner");
  const RadialField lu = laplacian(u);
  if (&u == &v) return integrate(hadamard(lu, lu));
  return integrate(hadamard(lu, laplacian(v)));
}

namespace {

double lp_norm_impl(const RadialField& u, double p, const RadialField* weight) {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm: p must be >= 1");
  if (weight) require_same_grid(u, *weight, "lp_norm");
  if (std::isinf(p)) {
    double m = 0.0;
    for (int i = 0; i < u.size(); ++i) {
      if (weight && !((*weight)[i] > 0.0)) continue;
      m = std::max(m, std::abs(u[i]));
    }
    return m;
  }
  const auto w = u.grid().volume_weights();
  double sum = 0.0;
  for (int i = 0; i < u.size(); ++i) {
    const double wi = weight ? (*weight)[i] : 1.0;
    if (wi == 0.0) continue;
    sum += w[i] * wi * std::pow(std::abs(u[i]), p);
  }
  return std::pow(sum, 1.0 / p);
}

}  // namespace

double lp_norm(const RadialField& u, double p) { return lp_norm_impl(u, p, nullptr); }

double lp_norm(const RadialField& u, double p, const RadialField& weight) {
  return lp_norm_impl(u, p, &weight);
}

}  // namespace semipos
