#include "semipos/mountain_pass.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semipos/error.hpp"

namespace semipos {

namespace {

using Vec = Eigen::VectorXd;

struct Path {
  std::vector<Vec> nodes;
  std::vector<double> levels;

  int argmax_interior() const {
    int best = 1;
    for (int k = 2; k + 1 < static_cast<int>(levels.size()); ++k) {
      if (levels[k] > levels[best]) best = k;
    }
    return best;
  }
  double max_level() const { return *std::max_element(levels.begin(), levels.end()); }
};

void evaluate(const ReducedEnergy& red, Path& path) {
  path.levels.resize(path.nodes.size());
  for (std::size_t k = 0; k < path.nodes.size(); ++k) path.levels[k] = red.value(path.nodes[k]);
}

Path straight_path(const Vec& end, int count) {
  Path p;
  for (int k = 0; k < count; ++k) p.nodes.push_back(end * (static_cast<double>(k) / (count - 1)));
  return p;
}

// Piecewise-linear path through the given anchors, nodes spaced uniformly
// in D^{2,2} arc length. Endpoints are copied exactly.
Path resample(const ReducedEnergy& red, const std::vector<Vec>& anchors, int count) {
  std::vector<double> cum(anchors.size(), 0.0);
  for (std::size_t k = 1; k < anchors.size(); ++k) {
    cum[k] = cum[k - 1] + red.norm(anchors[k] - anchors[k - 1]);
  }
  Path p;
  p.nodes.push_back(anchors.front());
  std::size_t seg = 0;
  for (int k = 1; k + 1 < count; ++k) {
    const double target = cum.back() * k / (count - 1);
    while (seg + 2 < anchors.size() && cum[seg + 1] < target) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double s = len > 0.0 ? std::clamp((target - cum[seg]) / len, 0.0, 1.0) : 0.0;
    p.nodes.push_back((1.0 - s) * anchors[seg] + s * anchors[seg + 1]);
  }
  p.nodes.push_back(anchors.back());
  return p;
}

// Newton iterations on c = g f_a(A c). Returns true and updates c when the
// relative residual reaches `target`.
bool newton_polish(const ReducedEnergy& red, Vec& c, double target) {
  Vec x = c;
  double res = red.norm(red.gradient(x));
  for (int it = 0; it < 30; ++it) {
    const double scale = std::max(red.norm(x), 1e-300);
    if (res <= target * scale) {
      c = x;
      return true;
    }
    const Vec grad = red.gradient(x);
    const Vec step = red.gradient_jacobian(x).partialPivLu().solve(-grad);
    if (!step.allFinite()) return false;
    const Vec next = x + step;
    const double next_res = red.norm(red.gradient(next));
    if (!(next_res < res)) return false;
    x = next;
    res = next_res;
  }
  return false;
}

}  // namespace

BumpKind parse_bump_kind(const std::string& name) {
  if (name == "gaussian") return BumpKind::Gaussian;
  if (name == "polynomial_bump") return BumpKind::PolynomialBump;
  throw InvalidArgument("unknown bump kind '" + name + "' (expected gaussian | polynomial_bump)");
}

std::string to_string(BumpKind kind) {
  return kind == BumpKind::Gaussian ? "gaussian" : "polynomial_bump";
}

Potential make_bump(const Model& model, BumpKind kind) {
  if (model.support_size() == 0) throw InvalidArgument("make_bump: weight has empty support");
  const RadialGrid& grid = model.grid();
  const double lo = grid.r(model.support().front());
  const double hi = grid.r(model.support().back());
  const double mid = 0.5 * (lo + hi);
  const double half = std::max(0.5 * (hi - lo), grid.spacing());
  RadialField source(grid);
  for (int j : model.support()) {
    const double x = (grid.r(j) - mid) / half;
    double profile;
    if (kind == BumpKind::Gaussian) {
      profile = std::exp(-4.0 * x * x);
    } else {
      // Widened so the end nodes of the support keep a positive value.
      const double y = x / 1.25;
      profile = y * y < 1.0 ? std::pow(1.0 - y * y, 3) : 0.0;
    }
    source[j] = model.g()[j] * profile;
  }
  Potential p = model.potential(source);
  const double len = std::sqrt(norm_sq(p));
  p.u *= 1.0 / len;
  p.source *= 1.0 / len;
  return p;
}

Potential find_vtilde(const Model& model, const ShiftedNonlinearity& shifted, const Potential& bump,
                      double rho, std::optional<double> t_start) {
  if (!(rho > 0.0)) throw InvalidArgument("find_vtilde: rho must be positive");
  if (bump.u.min() < 0.0) throw InvalidArgument("find_vtilde: bump must be nonnegative");
  if (std::abs(std::sqrt(norm_sq(bump)) - 1.0) > 1e-10) {
    throw InvalidArgument("find_vtilde: bump must satisfy ||Lap phi||_2 = 1");
  }
  const double limit = std::ldexp(rho, 30);
  for (double t = t_start.value_or(2.0 * rho); t <= limit; t *= 2.0) {
    Potential v{t * bump.u, t * bump.source};
    if (i_a(model, shifted, v) < 0.0) return v;
  }
  std::ostringstream os;
  os << "find_vtilde: I_a(t phi) stayed >= 0 up to t = 2^30 rho = " << limit
     << "; f may lack superlinear growth";
  throw NumericalError(os.str());
}

CeramiReport cerami_diagnostics(const std::vector<IterateRecord>& history) {
  if (history.size() < 10) throw InvalidArgument("cerami_diagnostics: need at least 10 iterates");
  CeramiReport rep;
  const std::size_t n = history.size();
  const std::size_t third = n / 3;
  double first = 0.0;
  double last = 0.0;
  double max_product = 0.0;
  bool finite = true;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& h = history[k];
    finite = finite && std::isfinite(h.norm_h2) && std::isfinite(h.residual);
    rep.max_norm = std::max(rep.max_norm, h.norm_h2);
    if (k < third) first = std::max(first, h.norm_h2);
    if (k >= n - third) last = std::max(last, h.norm_h2);
    max_product = std::max(max_product, h.residual * h.norm_h2);
  }
  rep.final_product = history.back().residual * history.back().norm_h2;
  rep.bounded_norms = finite && last <= 1.25 * first;
  rep.product_decay = finite && rep.final_product <= 1e-3 * max_product;
  return rep;
}

MPSolution mp_solve(const Model& model, const ShiftedNonlinearity& shifted,
                    const GeometryConstants& geometry, const MPConfig& config,
                    const std::optional<Potential>& warm_start) {
  if (config.path_nodes < 9) throw InvalidArgument("mp_solve: path needs at least 9 nodes");
  if (!(config.tol_res > 0.0)) throw InvalidArgument("mp_solve: tol_res must be positive");
  if (model.support_size() == 0) throw InvalidArgument("mp_solve: weight has empty support");

  MPSolution sol(model.grid());
  sol.a = shifted.a();
  if (shifted.a() >= geometry.a1) {
    std::ostringstream os;
    os << "a = " << shifted.a() << " is not below the a1 estimate " << geometry.a1;
    sol.warnings.push_back(os.str());
  }

  const ReducedEnergy red(model, shifted);
  const int count = config.path_nodes;
  const Potential bump = make_bump(model, config.bump);

  std::optional<Vec> warm;
  double t0 = 2.0 * geometry.rho;
  if (warm_start) {
    warm = model.restrict_source(warm_start->source);
    t0 = std::max(t0, 2.0 * red.norm(*warm));
  }
  sol.vtilde = find_vtilde(model, shifted, bump, geometry.rho, t0);
  sol.t_vtilde = std::sqrt(norm_sq(sol.vtilde));
  const Vec end = model.restrict_source(sol.vtilde.source);

  const auto seed_path = [&](bool use_warm) {
    Path p = use_warm ? resample(red, {Vec::Zero(end.size()), *warm, end}, count)
                      : straight_path(end, count);
    evaluate(red, p);
    return p;
  };
  Path path = seed_path(warm.has_value());
  bool reseeded = false;

  Vec best = path.nodes[path.argmax_interior()];
  double best_res = std::numeric_limits<double>::infinity();
  double window_ref = std::numeric_limits<double>::infinity();
  int window_start = 0;
  int next_newton = 0;
  bool converged = false;
  int iter = 0;

  for (; iter < config.max_iter; ++iter) {
    const int k = path.argmax_interior();
    if (!(path.levels[k] > std::max(path.levels.front(), path.levels.back()))) {
      if (reseeded) throw NumericalError("mp_solve: path maximizer pinned at an endpoint");
      path = seed_path(false);
      reseeded = true;
      continue;
    }
    const Vec c = path.nodes[k];
    const double level = path.levels[k];
    const Vec grad = red.gradient(c);
    const double res = red.norm(grad);
    const double nrm = red.norm(c);
    sol.history.push_back({level, nrm, res});

    if (res < best_res) {
      best_res = res;
      best = c;
    }
    if (res <= config.tol_res * nrm) {
      best = c;
      best_res = res;
      converged = true;
      Vec polished = c;
      if (config.newton_polish && newton_polish(red, polished, 1e-13)) {
        best = polished;
        sol.newton_used = true;
      }
      break;
    }
    if (config.newton_polish && iter >= next_newton && res <= 1e-2 * nrm) {
      Vec polished = c;
      if (newton_polish(red, polished, 1e-13)) {
        best = polished;
        best_res = red.norm(red.gradient(polished));
        sol.newton_used = true;
        converged = best_res <= config.tol_res * red.norm(polished);
        if (converged) break;
      }
      next_newton = iter + 25;
    }
    if (iter - window_start >= config.stagnation_window) {
      if (!(best_res < 0.999 * window_ref)) break;
      window_ref = best_res;
      window_start = iter;
    } else if (iter == 0) {
      window_ref = res;
    }

    // Armijo backtracking along -(u - T u).
    double tau = 1.0;
    Vec moved = c - tau * grad;
    double moved_level = red.value(moved);
    while (moved_level > level - config.armijo * tau * res * res && tau > 1e-12) {
      tau *= 0.5;
      moved = c - tau * grad;
      moved_level = red.value(moved);
    }
    if (!(moved_level < level)) break;
    const double old_max = path.max_level();
    path.nodes[k] = moved;
    path.levels[k] = moved_level;

    Path nudged = path;
    const Vec shift = 0.5 * (moved - c);
    for (int nb : {k - 1, k + 1}) {
      if (nb <= 0 || nb + 1 >= count) continue;
      nudged.nodes[nb] += shift;
      nudged.levels[nb] = red.value(nudged.nodes[nb]);
    }
    if (nudged.max_level() <= old_max) path = std::move(nudged);

    Path tensioned = resample(red, path.nodes, count);
    evaluate(red, tensioned);
    if (tensioned.max_level() <= path.max_level()) path = std::move(tensioned);
  }

  sol.iterations = iter;
  sol.converged = converged;
  sol.u = model.expand(best);
  sol.level = red.value(best);
  sol.norm_h2 = red.norm(best);
  sol.residual = red.norm(red.gradient(best));
  sol.rel_residual = sol.norm_h2 > 0.0 ? sol.residual / sol.norm_h2 : sol.residual;
  sol.rim_ok = sol.level >= geometry.beta - 1e-6;
  if (sol.history.size() >= 10) sol.cerami = cerami_diagnostics(sol.history);
  for (std::size_t k = 0; k < path.nodes.size(); ++k) {
    sol.path.nodes.push_back(model.expand(path.nodes[k]));
    sol.path.levels.push_back(path.levels[k]);
  }
  if (converged) {
    sol.status = sol.newton_used ? "converged (newton polish)" : "converged";
  } else if (iter >= config.max_iter) {
    sol.status = "iteration cap reached";
  } else {
    sol.status = "stagnated";
  }
  return sol;
}

}  // namespace semipos
