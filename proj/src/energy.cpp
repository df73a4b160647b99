#include "semipos/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "semipos/error.hpp"

namespace semipos {

Model::Model(RadialGrid grid, WeightSpec weight, std::string kernel_cache_dir)
    : grid_(std::move(grid)),
      weight_(std::move(weight)),
      g_(weight_.sample(grid_)),
      riesz_(grid_, std::move(kernel_cache_dir)) {
  const auto vol = grid_.volume_weights();
  for (int j = 0; j < grid_.size(); ++j) {
    if (g_[j] > 0.0 && vol[j] > 0.0) support_.push_back(j);
  }
  const int m = support_size();
  const KernelMatrix& k = riesz_.biharmonic();
  const double r4 = constants().r4;
  const double omega = grid_.sphere_area();
  a_.resize(m, m);
  vol_s_.resize(m);
  g_s_.resize(m);
  for (int p = 0; p < m; ++p) {
    vol_s_(p) = vol[support_[p]];
    g_s_(p) = g_[support_[p]];
  }
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) a_(p, q) = r4 * k(support_[p], support_[q]) * vol_s_(q) / omega;
  }
}

Potential Model::potential(const RadialField& source) const {
  if (!grid_.same_as(source.grid())) throw InvalidArgument("Model::potential: grid mismatch");
  return {constants().r4 * apply_potential(riesz_.biharmonic(), source), source};
}

Potential Model::expand(const Eigen::VectorXd& c) const {
  if (c.size() != support_size()) throw InvalidArgument("Model::expand: size mismatch");
  RadialField source(grid_);
  for (int p = 0; p < support_size(); ++p) source[support_[p]] = c(p);
  return potential(source);
}

Eigen::VectorXd Model::restrict_source(const RadialField& source) const {
  if (!grid_.same_as(source.grid())) throw InvalidArgument("Model::restrict_source: grid mismatch");
  Eigen::VectorXd c(support_size());
  std::size_t p = 0;
  for (int j = 0; j < grid_.size(); ++j) {
    if (p < support_.size() && support_[p] == j) {
      c(static_cast<Eigen::Index>(p)) = source[j];
      ++p;
    } else if (source[j] != 0.0 && grid_.volume_weights()[j] != 0.0) {
      throw InvalidArgument("Model::restrict_source: source not supported on the weight");
    }
  }
  return c;
}

double big_g(const Model& model, const RadialField& u) {
  return integrate(hadamard(model.g(), hadamard(u, u)));
}

double n_a(const Model& model, const ShiftedNonlinearity& shifted, const RadialField& u) {
  require_same_grid(model.g(), u, "n_a");
  const auto vol = model.grid().volume_weights();
  double sum = 0.0;
  for (int j : model.support()) sum += vol[j] * model.g()[j] * shifted.Fa(u[j]);
  return sum;
}

double i_a(const Model& model, const ShiftedNonlinearity& shifted, const RadialField& u) {
  return 0.5 * h2_inner(u, u) - n_a(model, shifted, u);
}

double i_a_derivative(const Model& model, const ShiftedNonlinearity& shifted, const RadialField& u,
                      const RadialField& v) {
  require_same_grid(u, v, "i_a_derivative");
  const auto vol = model.grid().volume_weights();
  double pairing = 0.0;
  for (int j : model.support()) pairing += vol[j] * model.g()[j] * shifted.fa(u[j]) * v[j];
  return h2_inner(u, v) - pairing;
}

double norm_sq(const Potential& p) { return integrate(hadamard(p.source, p.u)); }

double i_a(const Model& model, const ShiftedNonlinearity& shifted, const Potential& p) {
  return 0.5 * norm_sq(p) - n_a(model, shifted, p.u);
}

namespace {

// D^{2,2} inner product on support sources.
class Gram {
 public:
  explicit Gram(const Model& model) {
    const Eigen::MatrixXd m = model.support_volume().asDiagonal() * model.support_operator();
    m_ = 0.5 * (m + m.transpose());
  }
  double norm(const Eigen::VectorXd& c) const { return std::sqrt(std::max(c.dot(m_ * c), 0.0)); }

 private:
  Eigen::MatrixXd m_;
};

RadialField t_source(const Model& model, const ShiftedNonlinearity& shifted, const RadialField& u) {
  RadialField h(model.grid());
  for (int j : model.support()) h[j] = model.g()[j] * shifted.fa(u[j]);
  return h;
}

}  // namespace

EnergyReport energy_report(const Model& model, const ShiftedNonlinearity& shifted,
                           const Potential& p) {
  EnergyReport rep;
  const double nsq = norm_sq(p);
  rep.norm_h2 = std::sqrt(std::max(nsq, 0.0));
  rep.nonlinear_term = n_a(model, shifted, p.u);
  rep.value = 0.5 * nsq - rep.nonlinear_term;
  const Potential diff = model.potential(p.source - t_source(model, shifted, p.u));
  rep.grad_residual = std::sqrt(std::max(norm_sq(diff), 0.0));
  return rep;
}

GradientMap gradient_map(const Model& model, const ShiftedNonlinearity& shifted,
                         const RadialField& u) {
  require_same_grid(model.g(), u, "gradient_map");
  GradientMap out{model.potential(t_source(model, shifted, u)), 0.0};
  const RadialField diff = u - out.t_u.u;
  out.residual = std::sqrt(std::max(h2_inner(diff, diff), 0.0));
  return out;
}

ReducedEnergy::ReducedEnergy(const Model& model, const ShiftedNonlinearity& shifted)
    : model_(&model), shifted_(shifted) {
  const Eigen::MatrixXd m = model.support_volume().asDiagonal() * model.support_operator();
  m_ = 0.5 * (m + m.transpose());
}

Eigen::VectorXd ReducedEnergy::field(const Eigen::VectorXd& c) const {
  return model_->support_operator() * c;
}

double ReducedEnergy::inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  return x.dot(m_ * y);
}

double ReducedEnergy::norm(const Eigen::VectorXd& c) const {
  return std::sqrt(std::max(inner(c, c), 0.0));
}

double ReducedEnergy::value(const Eigen::VectorXd& c) const {
  const Eigen::VectorXd u = field(c);
  const Eigen::VectorXd& vol = model_->support_volume();
  const Eigen::VectorXd& g = model_->support_weight();
  double nl = 0.0;
  for (Eigen::Index p = 0; p < u.size(); ++p) nl += vol(p) * g(p) * shifted_.Fa(u(p));
  return 0.5 * inner(c, c) - nl;
}

Eigen::VectorXd ReducedEnergy::t_source(const Eigen::VectorXd& c) const {
  const Eigen::VectorXd u = field(c);
  const Eigen::VectorXd& g = model_->support_weight();
  Eigen::VectorXd out(u.size());
  for (Eigen::Index p = 0; p < u.size(); ++p) out(p) = g(p) * shifted_.fa(u(p));
  return out;
}

Eigen::VectorXd ReducedEnergy::gradient(const Eigen::VectorXd& c) const {
  return c - t_source(c);
}

Eigen::MatrixXd ReducedEnergy::gradient_jacobian(const Eigen::VectorXd& c) const {
  const Eigen::VectorXd u = field(c);
  const Eigen::VectorXd& g = model_->support_weight();
  Eigen::VectorXd d(u.size());
  for (Eigen::Index p = 0; p < u.size(); ++p) d(p) = g(p) * shifted_.dfa(u(p));
  const Eigen::Index m = u.size();
  return Eigen::MatrixXd::Identity(m, m) - d.asDiagonal() * model_->support_operator();
}

double estimate_bg(const Model& model, const PowerIterationOptions& opts) {
  const int m = model.support_size();
  if (m == 0) return 0.0;
  const Gram red(model);
  const Eigen::MatrixXd& a = model.support_operator();
  const Eigen::VectorXd& g = model.support_weight();
  Eigen::VectorXd c = g / red.norm(g);
  double lambda = 0.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    Eigen::VectorXd next = g.cwiseProduct(a * c);
    const double len = red.norm(next);
    if (!(len > 0.0) || !std::isfinite(len)) throw NumericalError("estimate_bg: degenerate iterate");
    next /= len;
    const bool done = std::abs(len - lambda) <= opts.tol * len;
    lambda = len;
    c = std::move(next);
    if (done) return lambda;
  }
  throw NumericalError("estimate_bg: power iteration did not converge");
}

double estimate_e_gamma(const Model& model, double gamma, std::uint64_t seed,
                        const PowerIterationOptions& opts) {
  if (!(gamma > 1.0)) throw InvalidArgument("estimate_e_gamma: gamma must exceed 1");
  const int m = model.support_size();
  if (m == 0) return 0.0;
  const Gram red(model);
  const Eigen::MatrixXd& a = model.support_operator();
  const Eigen::VectorXd& g = model.support_weight();
  const Eigen::VectorXd& vol = model.support_volume();

  const auto ratio = [&](const Eigen::VectorXd& c) {
    const Eigen::VectorXd u = a * c;
    double s = 0.0;
    for (int p = 0; p < m; ++p) s += vol(p) * g(p) * std::pow(std::abs(u(p)), gamma);
    return s / std::pow(red.norm(c), gamma);
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double best = 0.0;
  for (int start = 0; start < 8; ++start) {
    Eigen::VectorXd c(m);
    if (start == 0) {
      c = g;
    } else {
      for (int p = 0; p < m; ++p) c(p) = g(p) * uni(rng);
    }
    c /= red.norm(c);
    double prev = ratio(c);
    for (int it = 0; it < opts.max_iter; ++it) {
      const Eigen::VectorXd u = a * c;
      Eigen::VectorXd next(m);
      for (int p = 0; p < m; ++p) {
        next(p) = g(p) * std::pow(std::abs(u(p)), gamma - 2.0) * u(p);
      }
      const double len = red.norm(next);
      if (!(len > 0.0)) break;
      c = next / len;
      const double cur = ratio(c);
      const bool done = std::abs(cur - prev) <= opts.tol * cur;
      prev = cur;
      if (done) break;
    }
    best = std::max(best, prev);
  }
  return best;
}

double estimate_c_lin(const Model& model) {
  if (model.support_size() == 0) return 0.0;
  const Eigen::VectorXd& g = model.support_weight();
  const Eigen::VectorXd pot = model.support_operator() * g;
  return std::sqrt(std::max(g.dot(model.support_volume().cwiseProduct(pot)), 0.0));
}

double geometry_a(const GeometryInputs& in, double rho) {
  return rho * rho * (0.5 - 0.5 * in.eps * in.b_g) - in.c_gamma * std::pow(rho, in.gamma);
}

GeometryConstants estimate_a1(const GeometryInputs& in) {
  const double k = 0.5 - 0.5 * in.eps * in.b_g;
  if (!(k > 0.0) || !(in.c_gamma > 0.0) || !(in.gamma > 2.0) || !std::isfinite(in.c_gamma) ||
      !std::isfinite(k)) {
    throw NumericalError("estimate_a1: A has no positive zero (degenerate constants)");
  }
  if (!(in.c_lin > 0.0)) throw NumericalError("estimate_a1: c_lin must be positive");
  GeometryConstants out;
  out.b_g = in.b_g;
  out.eps = in.eps;
  out.eps_cap = in.b_g > 0.0 ? 1.0 / in.b_g : std::numeric_limits<double>::infinity();
  out.c_gamma = in.c_gamma;
  out.c_lin = in.c_lin;
  out.gamma = in.gamma;
  out.rho1 = std::pow(k / in.c_gamma, 1.0 / (in.gamma - 2.0));
  if (!std::isfinite(out.rho1)) throw NumericalError("estimate_a1: first zero of A overflows");

  // A(rho)/rho = k rho - c rho^{gamma-1} peaks where k = c (gamma-1) rho^{gamma-2}.
  const double rho = std::pow(k / (in.c_gamma * (in.gamma - 1.0)), 1.0 / (in.gamma - 2.0));
  out.rho = rho;
  const double a_rho = k * rho * rho * (in.gamma - 2.0) / (in.gamma - 1.0);
  out.a_admissible = a_rho / (in.c_lin * rho);
  out.a1 = 0.5 * out.a_admissible;
  out.beta = a_rho - out.a1 * in.c_lin * rho;
  return out;
}

GeometryConstants estimate_geometry(const Model& model, const NonlinearitySpec& spec,
                                    std::optional<double> eps, std::uint64_t seed) {
  if (model.grid().dim() != spec.dim()) throw InvalidArgument("estimate_geometry: dimension mismatch");
  const double b_g = estimate_bg(model);
  if (!(b_g > 0.0)) throw NumericalError("estimate_geometry: zero weight has no geometry");
  const double cap = 1.0 / b_g;
  const double e = eps.value_or(0.5 * cap);
  if (!(e > 0.0 && e < cap)) {
    throw InvalidArgument("estimate_geometry: eps must lie in (0, 1/B_g)");
  }
  GeometryInputs in;
  in.b_g = b_g;
  in.eps = e;
  in.gamma = spec.gamma();
  const double c_env = spec.with_envelope_eps(e).envelope().c;
  const double e_gamma = estimate_e_gamma(model, spec.gamma(), seed);
  in.c_gamma = c_env * e_gamma / spec.gamma();
  in.c_lin = estimate_c_lin(model);
  GeometryConstants out = estimate_a1(in);
  out.c_env = c_env;
  out.e_gamma = e_gamma;
  return out;
}

double lower_bound_beta1(const std::vector<double>& sup_norms) {
  if (sup_norms.empty()) throw InvalidArgument("lower_bound_beta1: empty sweep");
  return *std::min_element(sup_norms.begin(), sup_norms.end());
}

}  // namespace semipos
