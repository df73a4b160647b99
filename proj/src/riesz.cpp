#include "semipos/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "semipos/error.hpp"
#include "semipos/quadrature.hpp"

namespace semipos {

namespace {

constexpr int kPanelOrder = 20;
constexpr char kCacheMagic[8] = {'S', 'P', 'K', 'E', 'R', 'N', 'E', 'L'};
constexpr std::uint32_t kCacheVersion = 1;

// Integral of f over [a, b] with the fixed panel rule.
template <class F>
double panel(const F& f, double a, double b) {
  const quad::GaussRule& rule = quad::gauss_legendre(kPanelOrder);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int k = 0; k < kPanelOrder; ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * sum;
}

double angle_integral(int dim, double alpha, double r, double s) {
  const double diff2 = (r - s) * (r - s);
  const double rs = r * s;
  const auto integrand = [&](double t) {
    const double sh = std::sin(0.5 * t);
    const double dist2 = diff2 + 4.0 * rs * sh * sh;
    return std::pow(dist2, -0.5 * alpha) * std::pow(std::sin(t), dim - 2);
  };
  const double pi = std::numbers::pi;
  double sum = 0.0;
  if (r == s) {
    // Integrand ~ t^{N-2-alpha} at 0: geometric panels toward the origin.
    double hi = pi;
    for (int k = 0; k < 60; ++k) {
      const double lo = 0.5 * hi;
      sum += panel(integrand, lo, hi);
      hi = lo;
    }
    return sum;
  }
  const double theta0 = std::abs(r - s) / std::sqrt(rs);
  if (theta0 >= 0.5 * pi) {
    return panel(integrand, 0.0, 0.5 * pi) + panel(integrand, 0.5 * pi, pi);
  }
  double lo = 0.0;
  double hi = theta0;
  while (hi < pi) {
    sum += panel(integrand, lo, hi);
    lo = hi;
    hi = std::min(2.0 * hi, pi);
    if (pi - hi < 0.25 * (hi - lo)) hi = pi;
  }
  sum += panel(integrand, lo, pi);
  return sum;
}

// Mean of kappa(r, .) over the cell [r - h/2, r + h/2] clipped to s > 0,
// used on the diagonal when kappa(r, r) is infinite.
double cell_average(int dim, double alpha, double r, double h) {
  const double lo = std::max(r - 0.5 * h, 0.0);
  const double hi = r + 0.5 * h;
  const auto side = [&](double a, double b, bool toward_b) {
    double sum = 0.0;
    double width = b - a;
    for (int k = 0; k < 40; ++k) {
      const double w = 0.5 * width;
      const double p = toward_b ? b - width : a + w;
      const double q = toward_b ? b - w : a + width;
      sum += panel([&](double s) { return ring_kernel_value(dim, alpha, r, s); }, p, q);
      width = w;
    }
    return sum;
  };
  return (side(lo, r, true) + side(r, hi, false)) / (hi - lo);
}

void check_alpha(int dim, double alpha, const char* who) {
  if (!(alpha > 0.0) || !(alpha < dim)) {
    std::ostringstream os;
    os << who << ": alpha must lie in (0, N) = (0, " << dim << "), got " << alpha;
    throw InvalidArgument(os.str());
  }
}

bool read_cache(const std::filesystem::path& path, const RadialGrid& grid, double alpha,
                std::vector<double>& entries) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[8];
  std::uint32_t version = 0;
  std::int32_t dim = 0;
  std::int32_t n = 0;
  double r_max = 0.0;
  double a = 0.0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&dim), sizeof dim);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&r_max), sizeof r_max);
  in.read(reinterpret_cast<char*>(&a), sizeof a);
  if (!in || std::memcmp(magic, kCacheMagic, sizeof magic) != 0 || version != kCacheVersion ||
      dim != grid.dim() || n != grid.size() || r_max != grid.r_max() || a != alpha) {
    return false;
  }
  entries.resize(static_cast<std::size_t>(n) * n);
  in.read(reinterpret_cast<char*>(entries.data()),
          static_cast<std::streamsize>(entries.size() * sizeof(double)));
  return static_cast<bool>(in);
}

void write_cache(const std::filesystem::path& path, const RadialGrid& grid, double alpha,
                 const std::vector<double>& entries) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericalError("kernel cache: cannot write " + tmp);
    const std::int32_t dim = grid.dim();
    const std::int32_t n = grid.size();
    const double r_max = grid.r_max();
    out.write(kCacheMagic, sizeof kCacheMagic);
    out.write(reinterpret_cast<const char*>(&kCacheVersion), sizeof kCacheVersion);
    out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&r_max), sizeof r_max);
    out.write(reinterpret_cast<const char*>(&alpha), sizeof alpha);
    out.write(reinterpret_cast<const char*>(entries.data()),
              static_cast<std::streamsize>(entries.size() * sizeof(double)));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

RieszConstants RieszConstants::for_dim(int dim) {
  if (dim < 5) throw InvalidArgument("RieszConstants: dimension below 5");
  const double omega = sphere_area(dim);
  RieszConstants c;
  c.dim = dim;
  c.r4 = 1.0 / (2.0 * (dim - 2.0) * (dim - 4.0) * omega);
  c.r2 = 1.0 / ((dim - 2.0) * omega);
  return c;
}

double ring_kernel_value(int dim, double alpha, double r, double s) {
  if (dim < 3) throw InvalidArgument("ring_kernel_value: dimension below 3");
  if (!(alpha > 0.0)) throw InvalidArgument("ring_kernel_value: alpha must be positive");
  if (!(r >= 0.0) || !(s >= 0.0)) throw InvalidArgument("ring_kernel_value: negative radius");
  const double inf = std::numeric_limits<double>::infinity();
  if (r == 0.0 && s == 0.0) return inf;
  if (r == 0.0 || s == 0.0) return sphere_area(dim) * std::pow(std::max(r, s), -alpha);
  if (r == s && alpha >= dim - 1.0) return inf;
  return sphere_area(dim - 1) * angle_integral(dim, alpha, r, s);
}

KernelMatrix::KernelMatrix(RadialGrid grid, double alpha, std::vector<double> entries)
    : grid_(std::move(grid)), alpha_(alpha), entries_(std::move(entries)) {
  const auto n = static_cast<std::size_t>(grid_.size());
  if (entries_.size() != n * n) throw InvalidArgument("KernelMatrix: entry count mismatch");
}

std::string kernel_cache_name(const RadialGrid& grid, double alpha) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "kernel_N%d_n%d_R%.17g_a%.17g.bin", grid.dim(), grid.size(),
                grid.r_max(), alpha);
  return buf;
}

KernelMatrix ring_kernel(const RadialGrid& grid, double alpha, const std::string& cache_dir) {
  const int dim = grid.dim();
  check_alpha(dim, alpha, "ring_kernel");
  const int n = grid.size();
  std::vector<double> entries;

  std::filesystem::path cache_path;
  if (!cache_dir.empty()) {
    cache_path = std::filesystem::path(cache_dir) / kernel_cache_name(grid, alpha);
    if (read_cache(cache_path, grid, alpha, entries)) {
      return KernelMatrix(grid, alpha, std::move(entries));
    }
  }

  entries.assign(static_cast<std::size_t>(n) * n, 0.0);
  const auto r = grid.nodes();
  const double h = grid.spacing();
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double v;
      if (i != j) {
        v = ring_kernel_value(dim, alpha, r[i], r[j]);
      } else if (i == 0) {
        // Node 0 carries zero volume weight; any finite value works.
        v = ring_kernel_value(dim, alpha, 0.0, 0.5 * h);
      } else if (alpha < dim - 1.0) {
        v = ring_kernel_value(dim, alpha, r[i], r[i]);
      } else {
        v = cell_average(dim, alpha, r[i], h);
      }
      entries[static_cast<std::size_t>(i) * n + j] = v;
      entries[static_cast<std::size_t>(j) * n + i] = v;
    }
  }
  if (!cache_path.empty()) write_cache(cache_path, grid, alpha, entries);
  return KernelMatrix(grid, alpha, std::move(entries));
}

RadialField apply_potential(const KernelMatrix& kernel, const RadialField& h) {
  const RadialGrid& grid = kernel.grid();
  if (!grid.same_as(h.grid())) throw InvalidArgument("apply_potential: grid mismatch");
  const int n = grid.size();
  const auto vol = grid.volume_weights();
  const double omega = grid.sphere_area();

  std::vector<int> cols;
  std::vector<double> mass;
  for (int j = 0; j < n; ++j) {
    if (h[j] != 0.0 && vol[j] != 0.0) {
      cols.push_back(j);
      mass.push_back(h[j] * vol[j] / omega);
    }
  }
  RadialField out(grid);
  const double* k = kernel.entries().data();
  for (int i = 0; i < n; ++i) {
    const double* row = k + static_cast<std::size_t>(i) * n;
    double sum = 0.0;
    for (std::size_t c = 0; c < cols.size(); ++c) sum += row[cols[c]] * mass[c];
    out[i] = sum;
  }
  return out;
}

RieszOperator::RieszOperator(RadialGrid grid, std::string cache_dir)
    : grid_(std::move(grid)),
      cache_dir_(std::move(cache_dir)),
      constants_(RieszConstants::for_dim(grid_.dim())),
      bih_(std::make_shared<const KernelMatrix>(ring_kernel(grid_, grid_.dim() - 4.0, cache_dir_))),
      harm_once_(std::make_shared<std::once_flag>()) {}

const KernelMatrix& RieszOperator::harmonic() const {
  std::call_once(*harm_once_, [this] {
    harm_ = std::make_shared<const KernelMatrix>(ring_kernel(grid_, grid_.dim() - 2.0, cache_dir_));
  });
  return *harm_;
}

RieszSolution riesz_solve(const RieszOperator& op, const RadialField& h) {
  if (!op.grid().same_as(h.grid())) throw InvalidArgument("riesz_solve: grid mismatch");
  const int dim = op.grid().dim();
  // Any q in (1, N/4) will do for the integrability precondition.
  const double q = 0.5 * (1.0 + 0.25 * dim);
  if (!std::isfinite(lp_norm(h, q))) throw NumericalError("riesz_solve: source norm diverges");
  const RieszConstants& c = op.constants();
  RieszSolution sol{c.r4 * apply_potential(op.biharmonic(), h), c.r2 * newton_potential(h)};
  return sol;
}

RadialField newton_potential(const RadialField& h) {
  const RadialGrid& grid = h.grid();
  const int n = grid.size();
  const int dim = grid.dim();
  const double omega = sphere_area(dim);
  const quad::GaussRule& gl = quad::gauss_legendre(dim / 2 + 2);
  // Per cell: int h s^{N-1} ds and int h s ds with h linear on the cell.
  std::vector<double> inner(static_cast<std::size_t>(n), 0.0);
  std::vector<double> outer(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j + 1 < n; ++j) {
    const double a = grid.r(j), b = grid.r(j + 1);
    double mi = 0.0, mo = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double t = 0.5 * (1.0 + gl.nodes[q]);
      const double s = a + (b - a) * t;
      const double hv = (1.0 - t) * h[j] + t * h[j + 1];
      const double w = 0.5 * (b - a) * gl.weights[q] * hv;
      mi += w * std::pow(s, dim - 1);
      mo += w * s;
    }
    inner[static_cast<std::size_t>(j)] = mi;
    outer[static_cast<std::size_t>(j)] = mo;
  }
  for (int j = n - 2; j > 0; --j) outer[static_cast<std::size_t>(j - 1)] += outer[static_cast<std::size_t>(j)];
  RadialField out(grid);
  // Shells below r_i see r_i^{2-N}, shells above see s^{2-N}.
  double below = 0.0;
  for (int i = 0; i < n; ++i) {
    const double above = i + 1 < n ? outer[static_cast<std::size_t>(i)] : 0.0;
    out[i] = omega * ((i > 0 ? below * std::pow(grid.r(i), 2.0 - dim) : 0.0) + above);
    if (i + 1 < n) below += inner[static_cast<std::size_t>(i)];
  }
  return out;
}

double weak_lp_profile(int dim, double alpha) {
  if (dim < 5) throw InvalidArgument("weak_lp_profile: dimension below 5");
  if (std::abs(alpha - (dim - 4.0)) > 1e-12) {
    throw InvalidArgument("weak_lp_profile: alpha must equal N - 4");
  }
  const double p = dim / (dim - 4.0);
  const double ball = sphere_area(dim) / dim;
  double best = 0.0;
  for (double s : quad::logspace(1e-6, 1e6, 241)) {
    const double radius = std::pow(s, -1.0 / (dim - 4.0));
    best = std::max(best, std::pow(s, p) * ball * std::pow(radius, dim));
  }
  return best;
}

DecayEstimate decay_constant(const RadialField& u, const RadialField& source,
                             const RieszConstants& constants) {
  require_same_grid(u, source, "decay_constant");
  const RadialGrid& grid = u.grid();
  if (constants.dim != grid.dim()) throw InvalidArgument("decay_constant: dimension mismatch");
  std::vector<double> scaled;
  for (int i = 0; i < grid.size(); ++i) {
    const double r = grid.r(i);
    if (r >= 0.5 * grid.r_max()) scaled.push_back(std::pow(r, grid.dim() - 4) * u[i]);
  }
  std::sort(scaled.begin(), scaled.end());
  const std::size_t m = scaled.size();
  DecayEstimate est;
  est.fitted = (m % 2 == 1) ? scaled[m / 2] : 0.5 * (scaled[m / 2 - 1] + scaled[m / 2]);
  est.predicted = constants.r4 * integrate(source);
  est.predicted_positive = est.predicted > 0.0;
  return est;
}

}  // namespace semipos
