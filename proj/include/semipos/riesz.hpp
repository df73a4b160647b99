#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "semipos/radial.hpp"

namespace semipos {

/// R4 = 1/(2(N-2)(N-4) omega_N) and R2 = 1/((N-2) omega_N).
struct RieszConstants {
  int dim = 0;
  double r4 = 0.0;
  double r2 = 0.0;

  static RieszConstants for_dim(int dim);
};

/// Spherical average of |r e1 - s w|^{-alpha} over w in S^{N-1}, times the
/// sphere area:
///   kappa(r, s) = |S^{N-2}| int_0^pi (r^2 + s^2 - 2 r s cos t)^{-alpha/2} sin^{N-2} t dt.
/// The angle integral is split into dyadic panels starting at the scale
/// |r - s| / sqrt(r s) where the integrand turns over, each with a fixed
/// Gauss-Legendre rule. Returns +inf when r == s and alpha >= N - 1.
double ring_kernel_value(int dim, double alpha, double r, double s);

/// Dense matrix of ring kernel values on a grid.
class KernelMatrix {
 public:
  KernelMatrix(RadialGrid grid, double alpha, std::vector<double> entries);

  const RadialGrid& grid() const noexcept { return grid_; }
  double alpha() const noexcept { return alpha_; }
  int size() const noexcept { return grid_.size(); }
  double operator()(int i, int j) const {
    return entries_[static_cast<std::size_t>(i) * size() + j];
  }
  const std::vector<double>& entries() const noexcept { return entries_; }

 private:
  RadialGrid grid_;
  double alpha_;
  std::vector<double> entries_;
};

/// Assemble kappa_alpha on all node pairs (rows in parallel). When
/// `cache_dir` is non-empty the matrix is read from / written to a binary
/// file keyed by (dim, n, r_max, alpha).
KernelMatrix ring_kernel(const RadialGrid& grid, double alpha, const std::string& cache_dir = "");

/// File name used by the kernel cache.
std::string kernel_cache_name(const RadialGrid& grid, double alpha);

/// (I h)(r_i) = sum_j kappa(r_i, s_j) h(s_j) s_j^{N-1} w_j.
RadialField apply_potential(const KernelMatrix& kernel, const RadialField& h);

/// I_{N-2} h by Newton's shell formula, with h linear between nodes and the
/// shell moments integrated exactly. Used for -Lap u in riesz_solve: the
/// node quadrature of apply_potential leaves an O(h^2) error near r = 0 that
/// is not smooth in r, so a second difference of it does not converge there.
RadialField newton_potential(const RadialField& h);

struct RieszSolution {
  RadialField u;
  RadialField neg_lap;
};

/// Kernels for alpha = N-4 (biharmonic) and N-2 (harmonic) on one grid. The
/// harmonic kernel is only assembled on first use.
class RieszOperator {
 public:
  explicit RieszOperator(RadialGrid grid, std::string cache_dir = "");

  const RadialGrid& grid() const noexcept { return grid_; }
  const RieszConstants& constants() const noexcept { return constants_; }
  const KernelMatrix& biharmonic() const { return *bih_; }
  const KernelMatrix& harmonic() const;

 private:
  RadialGrid grid_;
  std::string cache_dir_;
  RieszConstants constants_;
  std::shared_ptr<const KernelMatrix> bih_;
  mutable std::shared_ptr<const KernelMatrix> harm_;
  mutable std::shared_ptr<std::once_flag> harm_once_;
};

/// u = R4 I_{N-4} h and -Lap u = R2 I_{N-2} h. Throws NumericalError when h
/// has non-finite entries or an infinite discrete L^q norm.
RieszSolution riesz_solve(const RieszOperator& op, const RadialField& h);

/// sup_s s^{N/(N-4)} |{x : |x|^{4-N} > s}| evaluated on a logarithmic grid of
/// levels; alpha must equal N - 4.
double weak_lp_profile(int dim, double alpha);

struct DecayEstimate {
  double fitted = 0.0;
  double predicted = 0.0;
  /// False when the predicted constant is not strictly positive.
  bool predicted_positive = false;
};

/// fitted = median of r^{N-4} u(r) over [r_max/2, r_max]; predicted =
/// R4 * integrate(source).
DecayEstimate decay_constant(const RadialField& u, const RadialField& source,
                             const RieszConstants& constants);

}  // namespace semipos
