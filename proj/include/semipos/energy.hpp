#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semipos/nonlinearity.hpp"
#include "semipos/radial.hpp"
#include "semipos/riesz.hpp"
#include "semipos/weight.hpp"

namespace semipos {

/// A field given together with its biharmonic source: u = R4 I_{N-4} source,
/// i.e. Lap^2 u = source on R^N. For such fields ||Lap u||_2^2 =
/// int source * u exactly, with no truncation at r_max.
struct Potential {
  RadialField u;
  RadialField source;
};

/// Grid, sampled weight and Riesz kernels shared by every energy evaluation.
///
/// Sources of the form g * (something) live on the support S of the sampled
/// weight, so the variational problem closes on the |S| support values of
/// the source. `reduced()` exposes that finite-dimensional form.
class Model {
 public:
  Model(RadialGrid grid, WeightSpec weight, std::string kernel_cache_dir = "");

  const RadialGrid& grid() const noexcept { return grid_; }
  const WeightSpec& weight() const noexcept { return weight_; }
  /// Weight sampled onto the grid.
  const RadialField& g() const noexcept { return g_; }
  const RieszOperator& riesz() const noexcept { return riesz_; }
  const RieszConstants& constants() const noexcept { return riesz_.constants(); }

  /// Node indices with g > 0.
  const std::vector<int>& support() const noexcept { return support_; }
  int support_size() const noexcept { return static_cast<int>(support_.size()); }
  /// u_S = A c for a source supported on S with values c.
  const Eigen::MatrixXd& support_operator() const noexcept { return a_; }
  /// Volume weights and weight values on S.
  const Eigen::VectorXd& support_volume() const noexcept { return vol_s_; }
  const Eigen::VectorXd& support_weight() const noexcept { return g_s_; }

  /// Potential of an arbitrary source.
  Potential potential(const RadialField& source) const;
  /// Potential of a source supported on S.
  Potential expand(const Eigen::VectorXd& c) const;
  /// Support values of a source; throws if it is nonzero off S.
  Eigen::VectorXd restrict_source(const RadialField& source) const;

 private:
  RadialGrid grid_;
  WeightSpec weight_;
  RadialField g_;
  RieszOperator riesz_;
  std::vector<int> support_;
  Eigen::MatrixXd a_;
  Eigen::VectorXd vol_s_;
  Eigen::VectorXd g_s_;
};

/// G(u) = int g u^2.
double big_g(const Model& model, const RadialField& u);
/// N_a(u) = int g F_a(u).
double n_a(const Model& model, const ShiftedNonlinearity& shifted, const RadialField& u);
/// I_a(u) = h2_inner(u, u)/2 - N_a(u) with the finite-difference Laplacian.
double i_a(const Model& model, const ShiftedNonlinearity& shifted, const RadialField& u);
/// <I_a'(u), v> = h2_inner(u, v) - int g f_a(u) v.
double i_a_derivative(const Model& model, const ShiftedNonlinearity& shifted, const RadialField& u,
                      const RadialField& v);

/// ||Lap u||_2^2 = int source * u for a potential.
double norm_sq(const Potential& p);
/// I_a on a potential using the representation norm.
double i_a(const Model& model, const ShiftedNonlinearity& shifted, const Potential& p);

struct EnergyReport {
  double value = 0.0;
  double norm_h2 = 0.0;
  double nonlinear_term = 0.0;
  /// ||Lap(u - T u)||_2
  double grad_residual = 0.0;
};

/// Energy report for a potential; every term uses the representation norm.
EnergyReport energy_report(const Model& model, const ShiftedNonlinearity& shifted,
                           const Potential& p);

struct GradientMap {
  Potential t_u;
  double residual = 0.0;
};

/// T(u) = riesz_solve(g f_a(u)).u and residual sqrt(h2_inner(u - T u, u - T u))
/// with the finite-difference Laplacian.
GradientMap gradient_map(const Model& model, const ShiftedNonlinearity& shifted,
                         const RadialField& u);

/// Energy restricted to potentials of sources on the weight support.
/// Coordinates c are the support values of the source.
class ReducedEnergy {
 public:
  ReducedEnergy(const Model& model, const ShiftedNonlinearity& shifted);

  const Model& model() const noexcept { return *model_; }
  const ShiftedNonlinearity& shifted() const noexcept { return shifted_; }
  int size() const noexcept { return model_->support_size(); }

  /// u on the support.
  Eigen::VectorXd field(const Eigen::VectorXd& c) const;
  /// D^{2,2} inner product of two potentials.
  double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  double norm(const Eigen::VectorXd& c) const;
  double value(const Eigen::VectorXd& c) const;
  /// Source of u - T(u); its norm is the gradient residual.
  Eigen::VectorXd gradient(const Eigen::VectorXd& c) const;
  /// Source of T(u) = g f_a(u).
  Eigen::VectorXd t_source(const Eigen::VectorXd& c) const;
  /// Jacobian of c -> c - g f_a(A c).
  Eigen::MatrixXd gradient_jacobian(const Eigen::VectorXd& c) const;

 private:
  const Model* model_;
  ShiftedNonlinearity shifted_;
  Eigen::MatrixXd m_;
};

struct PowerIterationOptions {
  int max_iter = 5000;
  double tol = 1e-12;
};

/// Largest eigenvalue of u -> R4 I_{N-4}(g u) in the D^{2,2} inner product,
/// which is the best constant B_g in int g u^2 <= B_g ||Lap u||_2^2.
/// Zero for a zero weight.
double estimate_bg(const Model& model, const PowerIterationOptions& opts = {});

/// Empirical sup of int g |u|^gamma / ||Lap u||_2^gamma by nonlinear power
/// iteration from several starts.
double estimate_e_gamma(const Model& model, double gamma, std::uint64_t seed = 1,
                        const PowerIterationOptions& opts = {});

/// sup int g|u| / ||Lap u||_2 = sqrt(int g R4 I_{N-4} g); attained at the
/// potential of g because the kernel is positive.
double estimate_c_lin(const Model& model);

struct GeometryInputs {
  double b_g = 0.0;
  double eps = 0.0;
  double c_gamma = 0.0;
  double c_lin = 0.0;
  double gamma = 0.0;
};

/// Mountain-pass geometry estimates. Every constant is an empirical
/// estimate on the discrete model, not a rigorous bound.
struct GeometryConstants {
  double b_g = 0.0;
  double eps = 0.0;
  /// eps must stay below 1/b_g.
  double eps_cap = 0.0;
  /// Envelope constant C in f(t) <= eps t + C t^{gamma-1}.
  double c_env = 0.0;
  double e_gamma = 0.0;
  /// C E_gamma / gamma, the coefficient of rho^gamma in A.
  double c_gamma = 0.0;
  double c_lin = 0.0;
  double gamma = 0.0;
  /// First positive zero of A.
  double rho1 = 0.0;
  double rho = 0.0;
  double beta = 0.0;
  double a1 = 0.0;
  /// sup_rho A(rho)/(c_lin rho): every a below it keeps I_a > 0 on S_rho.
  double a_admissible = 0.0;
};

/// A(rho) = rho^2 (1/2 - eps b_g / 2) - c_gamma rho^gamma.
double geometry_a(const GeometryInputs& in, double rho);

/// Maximize A(rho)/rho on (0, rho1) for rho*, then a1 = A(rho*)/(2 c_lin rho*)
/// and beta = A(rho*) - a1 c_lin rho*. Throws NumericalError when A has no
/// positive zero.
GeometryConstants estimate_a1(const GeometryInputs& in);

/// Full pipeline: B_g, the envelope refitted at eps (default half the cap),
/// E_gamma, c_lin and estimate_a1.
GeometryConstants estimate_geometry(const Model& model, const NonlinearitySpec& spec,
                                    std::optional<double> eps = std::nullopt,
                                    std::uint64_t seed = 1);

/// Empirical beta_1: min of the sup norms; throws on an empty list.
double lower_bound_beta1(const std::vector<double>& sup_norms);

}  // namespace semipos
