#include "semipos/weight.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "semipos/error.hpp"
#include "semipos/nonlinearity.hpp"
#include "semipos/quadrature.hpp"
#include "semipos/riesz.hpp"

namespace semipos {

namespace {

constexpr int kOrder = 20;

template <class F>
double gl(const F& f, double a, double b) {
  if (!(b > a)) return 0.0;
  const quad::GaussRule& rule = quad::gauss_legendre(kOrder);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int k = 0; k < kOrder; ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * sum;
}

template <class F>
double gl_composite(const F& f, double a, double b, int panels) {
  double sum = 0.0;
  const double w = (b - a) / panels;
  for (int k = 0; k < panels; ++k) sum += gl(f, a + k * w, a + (k + 1) * w);
  return sum;
}

// Panels on [a, b] refined geometrically toward the point of [a, b]
// nearest to x.
template <class F>
double gl_graded(const F& f, double a, double b, double x) {
  const double c = std::clamp(x, a, b);
  const double dist = std::abs(x - c);
  double sum = 0.0;
  for (int side = 0; side < 2; ++side) {
    const double len = side == 0 ? c - a : b - c;
    if (!(len > 0.0)) continue;
    const double floor_w = std::max(0.5 * dist, 1e-15 * len);
    double width = len;
    while (width > floor_w) {
      const double half = 0.5 * width;
      if (side == 0) {
        sum += gl_composite(f, c - width, c - half, 2);
      } else {
        sum += gl_composite(f, c + half, c + width, 2);
      }
      width = half;
    }
    sum += side == 0 ? gl(f, c - width, c) : gl(f, c, c + width);
  }
  return sum;
}

void require_dim(int dim) {
  if (dim < 5) throw InvalidArgument("weight: dimension below 5");
}

}  // namespace

WeightSpec::WeightSpec(std::string family, int dim, std::function<double(double)> profile,
                       double r_lo, double r_hi, double d)
    : family_(std::move(family)),
      dim_(dim),
      profile_(std::move(profile)),
      r_lo_(r_lo),
      r_hi_(r_hi),
      d_(d),
      breaks_{r_lo, r_hi} {}

WeightSpec WeightSpec::example(int dim, double d, double r_in, double r_out) {
  require_dim(dim);
  if (!(d > 0.0) || !std::isfinite(d)) throw InvalidArgument("example_weight: d must be positive");
  if (!(r_in >= 0.5 && r_in < r_out && r_out <= 1.0)) {
    std::ostringstream os;
    os << "example_weight: radii must satisfy 1/2 <= r_in < r_out <= 1, got [" << r_in << ", "
       << r_out << "]";
    throw InvalidArgument(os.str());
  }
  WeightSpec w("paper_example", dim,
               [d, r_in, r_out](double r) {
                 return (r >= r_in && r <= r_out) ? std::pow(r, -d) : 0.0;
               },
               r_in, r_out, d);
  const double omega = sphere_area(dim);
  const auto power_norm = [&](double p) {
    const double k = dim - d * p;
    const double integral = std::abs(k) < 1e-14 ? std::log(r_out / r_in)
                                                : (std::pow(r_out, k) - std::pow(r_in, k)) / k;
    return std::pow(omega * integral, 1.0 / p);
  };
  w.norms_.l1 = power_norm(1.0);
  w.norms_.linf = std::pow(r_in, -d);
  w.norms_.l_n4 = power_norm(0.25 * dim);
  w.norms_.l_dual = power_norm(2.0 * dim / (dim + 4.0));
  return w;
}

WeightSpec WeightSpec::custom_table(int dim, std::vector<std::pair<double, double>> table) {
  require_dim(dim);
  if (table.size() < 2) throw InvalidArgument("custom_table: need at least two rows");
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto [r, g] = table[i];
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("custom_table: bad radius");
    if (!(g >= 0.0) || !std::isfinite(g)) throw InvalidArgument("custom_table: weight must be >= 0");
    if (i > 0 && !(r > table[i - 1].first)) {
      throw InvalidArgument("custom_table: radii must be strictly increasing");
    }
  }
  auto shared = std::make_shared<const std::vector<std::pair<double, double>>>(table);
  WeightSpec w("custom_table", dim,
               [shared](double r) {
                 const auto& t = *shared;
                 if (r < t.front().first || r > t.back().first) return 0.0;
                 auto it = std::lower_bound(t.begin(), t.end(), r,
                                            [](const auto& row, double x) { return row.first < x; });
                 if (it == t.begin()) return it->second;
                 const auto& [r1, g1] = *it;
                 const auto& [r0, g0] = *(it - 1);
                 return g0 + (g1 - g0) * (r - r0) / (r1 - r0);
               },
               table.front().first, table.back().first, 0.0);
  w.breaks_.clear();
  for (const auto& row : table) w.breaks_.push_back(row.first);
  w.norms_.l1 = w.lp_norm_quadrature(1.0);
  w.norms_.linf = w.lp_norm_quadrature(kInfNorm);
  w.norms_.l_n4 = w.lp_norm_quadrature(0.25 * dim);
  w.norms_.l_dual = w.lp_norm_quadrature(2.0 * dim / (dim + 4.0));
  return w;
}

WeightSpec WeightSpec::from_table_file(int dim, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("custom_table: cannot read " + path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double r = 0.0;
    double g = 0.0;
    if (ls >> r >> g) rows.emplace_back(r, g);
  }
  return custom_table(dim, std::move(rows));
}

WeightSpec WeightSpec::zero(int dim) {
  require_dim(dim);
  return WeightSpec("zero", dim, [](double) { return 0.0; }, 0.5, 1.0, 0.0);
}

double WeightSpec::operator()(double r) const { return profile_(r); }

WeightSpec WeightSpec::scaled(double c) const {
  if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("WeightSpec::scaled: c must be >= 0");
  WeightSpec w = *this;
  auto base = profile_;
  w.profile_ = [base, c](double r) { return c * base(r); };
  w.norms_.l1 *= c;
  w.norms_.linf *= c;
  w.norms_.l_n4 *= c;
  w.norms_.l_dual *= c;
  return w;
}

RadialField WeightSpec::sample(const RadialGrid& grid) const {
  if (grid.dim() != dim_) throw InvalidArgument("WeightSpec::sample: dimension mismatch");
  if (r_hi_ > grid.r_max()) throw InvalidArgument("WeightSpec::sample: support exceeds grid");
  const int n = grid.size();
  const double h = grid.spacing();
  const double omega = grid.sphere_area();
  const auto vol = grid.volume_weights();
  const int nm1 = dim_ - 1;
  RadialField g(grid);
  g[0] = profile_(0.0);
  for (int j = 1; j < n; ++j) {
    const double lo = std::max(grid.r(j) - 0.5 * h, 0.0);
    const double hi = std::min(grid.r(j) + 0.5 * h, grid.r_max());
    if (hi <= r_lo_ || lo >= r_hi_) continue;
    double mass = 0.0;
    for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
      const double a = std::max(lo, breaks_[k]);
      const double b = std::min(hi, breaks_[k + 1]);
      if (b > a) mass += gl([&](double r) { return profile_(r) * std::pow(r, nm1); }, a, b);
    }
    g[j] = mass * omega / vol[j];
  }
  return g;
}

double WeightSpec::lp_norm_quadrature(double p) const {
  if (!(p >= 1.0)) throw InvalidArgument("WeightSpec::lp_norm_quadrature: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
      const double a = breaks_[k];
      const double b = breaks_[k + 1];
      for (int i = 0; i <= 4096; ++i) m = std::max(m, profile_(a + (b - a) * i / 4096.0));
    }
    return m;
  }
  const int nm1 = dim_ - 1;
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
    sum += gl_composite(
        [&](double r) { return std::pow(profile_(r), p) * std::pow(r, nm1); }, breaks_[k],
        breaks_[k + 1], 16);
  }
  return std::pow(sphere_area(dim_) * sum, 1.0 / p);
}

G1Report check_g1(const WeightSpec& spec) {
  G1Report rep;
  const int dim = spec.dim();
  rep.norms.l1 = spec.lp_norm_quadrature(1.0);
  rep.norms.linf = spec.lp_norm_quadrature(kInfNorm);
  rep.norms.l_n4 = spec.lp_norm_quadrature(0.25 * dim);
  rep.norms.l_dual = spec.lp_norm_quadrature(2.0 * dim / (dim + 4.0));
  const WeightNorms& n = rep.norms;
  rep.passed = std::isfinite(n.l1) && std::isfinite(n.linf) && std::isfinite(n.l_n4) &&
               std::isfinite(n.l_dual);
  if (!rep.passed) rep.warnings.push_back("divergent norm quadrature");
  if (n.l1 == 0.0 && n.linf == 0.0) rep.warnings.push_back("degenerate weight: g vanishes");
  return rep;
}

std::vector<double> default_g2_samples() { return quad::logspace(1.0, 1e3, 25); }

G2Report check_g2(const WeightSpec& spec, double delta, const std::vector<double>& x_samples,
                  bool punctured) {
  const int dim = spec.dim();
  const double crit = critical_exponent(dim);
  const bool is_one = delta == 1.0;
  const bool is_crit = std::abs(delta - crit) <= 1e-12 * crit;
  if (!is_one && !is_crit) {
    std::ostringstream os;
    os << "check_g2: delta must be 1 or 2N/(N-4) = " << crit << ", got " << delta;
    throw InvalidArgument(os.str());
  }
  if (punctured && !is_one) throw InvalidArgument("check_g2: punctured variant needs delta = 1");
  if (x_samples.empty()) throw InvalidArgument("check_g2: empty sample set");
  for (double x : x_samples) {
    if (punctured ? !(x > 0.0) : !(x >= 1.0)) {
      throw InvalidArgument("check_g2: sample radius outside the admissible range");
    }
  }

  G2Report rep;
  rep.delta = is_crit ? crit : 1.0;
  rep.alpha = (dim - 4.0) * rep.delta;
  const double alpha = rep.alpha;
  const double lo = spec.r_in();
  const double hi = spec.r_out();
  const int nm1 = dim - 1;

  rep.limit = spec.is_zero() ? 0.0 : std::pow(spec.lp_norm_quadrature(rep.delta), rep.delta);
  rep.c_g = 0.0;
  rep.passed = true;
  std::ostringstream detail;
  for (double x : x_samples) {
    double lhs;
    if (spec.is_zero()) {
      lhs = 0.0;
    } else if (alpha >= dim && x >= lo && x <= hi && spec(x) > 0.0) {
      lhs = std::numeric_limits<double>::infinity();
    } else {
      const auto integrand = [&](double s) {
        const double gs = spec(s);
        if (gs == 0.0) return 0.0;
        return std::pow(gs, rep.delta) * ring_kernel_value(dim, alpha, x, s) * std::pow(s, nm1);
      };
      lhs = std::pow(x, alpha) * gl_graded(integrand, lo, hi, x);
    }
    rep.samples.emplace_back(x, lhs);
    if (!std::isfinite(lhs)) {
      if (rep.passed) detail << "left side not finite at |x| = " << x;
      rep.passed = false;
      rep.c_g = std::numeric_limits<double>::infinity();
    } else {
      rep.c_g = std::max(rep.c_g, lhs);
    }
  }
  rep.detail = rep.passed ? "left side finite at every sample" : detail.str();
  return rep;
}

}  // namespace semipos
