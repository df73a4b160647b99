#include "semipos/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "semipos/error.hpp"
#include "semipos/quadrature.hpp"

namespace semipos {

namespace {

constexpr double kPrimitiveTol = 1e-10;

void require_gamma(int dim, double gamma) {
  if (dim < 5) throw InvalidArgument("nonlinearity: dimension below 5");
  const double crit = critical_exponent(dim);
  if (!(gamma > 2.0 && gamma < crit)) {
    std::ostringstream os;
    os << "nonlinearity: gamma must lie in (2, " << crit << "), got " << gamma;
    throw InvalidArgument(os.str());
  }
}

double example_primitive(double t) {
  // int_0^t 2 s ln(1+s) ds
  return (t * t - 1.0) * std::log1p(t) - 0.5 * t * t + t;
}

std::vector<double> positive_sorted(std::span<const double> samples) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (double t : samples) {
    if (t > 0.0 && std::isfinite(t)) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> require_samples(std::span<const double> samples, const char* who) {
  if (samples.empty()) throw InvalidArgument(std::string(who) + ": empty sample set");
  auto pos = positive_sorted(samples);
  if (pos.size() < 8) throw InvalidArgument(std::string(who) + ": too few positive samples");
  if (pos.back() < 1e4) {
    throw InvalidArgument(std::string(who) + ": samples must reach at least 1e4");
  }
  return pos;
}

// Default samples extended by decades until the envelope ratio
// (f(t) - eps t) / t^{gamma-1} stops growing; for large eps the binding
// range sits far beyond the default grid.
std::vector<double> envelope_samples(const NonlinearitySpec& spec, double eps) {
  std::vector<double> s = default_samples();
  const double q = spec.gamma() - 1.0;
  const auto ratio = [&](double t) { return (spec.f(t) - eps * t) / std::pow(t, q); };
  double best = -std::numeric_limits<double>::infinity();
  for (double t : s) {
    if (t > 0.0) best = std::max(best, ratio(t));
  }
  double hi = s.back();
  int stale = 0;
  while (hi < 1e150 && stale < 3) {
    const auto decade = quad::logspace(hi, 10.0 * hi, 101);
    double dec_best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < decade.size(); ++k) {
      const double r = ratio(decade[k]);
      if (!std::isfinite(r)) return s;
      dec_best = std::max(dec_best, r);
      s.push_back(decade[k]);
    }
    const bool grew = best > 0.0 ? dec_best > best * (1.0 + 1e-9) : dec_best > best;
    stale = grew ? 0 : stale + 1;
    best = std::max(best, dec_best);
    hi *= 10.0;
  }
  return s;
}

}  // namespace

double critical_exponent(int dim) {
  if (dim <= 4) throw InvalidArgument("critical_exponent: dimension must exceed 4");
  return 2.0 * dim / (dim - 4.0);
}

NonlinearitySpec::NonlinearitySpec(std::string name, Fn f, Fn primitive, Fn derivative, int dim,
                                   double gamma, double c_f, double r_mono, bool lipschitz)
    : name_(std::move(name)),
      f_(std::move(f)),
      primitive_(std::move(primitive)),
      derivative_(std::move(derivative)),
      dim_(dim),
      gamma_(gamma),
      c_f_(c_f),
      r_mono_(r_mono),
      lipschitz_(lipschitz) {
  require_gamma(dim, gamma);
  if (!f_) throw InvalidArgument("nonlinearity: f is empty");
  if (!(c_f > 0.0)) throw InvalidArgument("nonlinearity: C_f must be positive");
  if (!(r_mono > 0.0)) throw InvalidArgument("nonlinearity: monotonicity threshold must be positive");
  if (f_(0.0) != 0.0) throw InvalidArgument("nonlinearity: f(0) must be exactly 0");
  envelope_ = fit_growth_envelope(*this, 0.5, envelope_samples(*this, 0.5));
}

NonlinearitySpec NonlinearitySpec::paper_example(int dim, double gamma, double c_f, double r_mono) {
  return NonlinearitySpec(
      "paper_example", [](double t) { return 2.0 * t * std::log1p(t); }, example_primitive,
      [](double t) { return 2.0 * std::log1p(t) + 2.0 * t / (1.0 + t); }, dim, gamma, c_f, r_mono,
      true);
}

NonlinearitySpec NonlinearitySpec::power(int dim, double coef, double p, double gamma, double c_f,
                                         double r_mono) {
  if (!(p >= 1.0)) throw InvalidArgument("power nonlinearity: exponent must be >= 1");
  if (!(coef > 0.0)) throw InvalidArgument("power nonlinearity: coefficient must be positive");
  std::ostringstream name;
  name << "power(" << coef << "*t^" << p << ")";
  return NonlinearitySpec(
      name.str(), [coef, p](double t) { return coef * std::pow(t, p); },
      [coef, p](double t) { return coef * std::pow(t, p + 1.0) / (p + 1.0); },
      [coef, p](double t) { return p == 1.0 ? coef : coef * p * std::pow(t, p - 1.0); }, dim,
      gamma, c_f, r_mono, true);
}

NonlinearitySpec NonlinearitySpec::log_power(int dim, double coef, double p, double gamma,
                                             double c_f, double r_mono) {
  if (!(p >= 1.0)) throw InvalidArgument("log nonlinearity: exponent must be >= 1");
  if (!(coef > 0.0)) throw InvalidArgument("log nonlinearity: coefficient must be positive");
  std::ostringstream name;
  name << "log(" << coef << "*t^" << p << "*ln(1+t))";
  Fn primitive;
  if (p == 1.0) primitive = [coef](double t) { return 0.5 * coef * example_primitive(t); };
  return NonlinearitySpec(
      name.str(), [coef, p](double t) { return coef * std::pow(t, p) * std::log1p(t); },
      std::move(primitive),
      [coef, p](double t) {
        return coef * (p * std::pow(t, p - 1.0) * std::log1p(t) + std::pow(t, p) / (1.0 + t));
      },
      dim, gamma, c_f, r_mono, true);
}

NonlinearitySpec NonlinearitySpec::custom(std::string name, Fn f, Fn primitive, int dim,
                                          double gamma, double c_f, double r_mono, bool lipschitz,
                                          Fn derivative) {
  return NonlinearitySpec(std::move(name), std::move(f), std::move(primitive),
                          std::move(derivative), dim, gamma, c_f, r_mono, lipschitz);
}

double NonlinearitySpec::f(double t) const {
  if (t < 0.0) throw InvalidArgument("eval_f: argument must be >= 0");
  return f_(t);
}

double NonlinearitySpec::F(double t) const {
  if (t < 0.0) throw InvalidArgument("eval_F: argument must be >= 0");
  if (t == 0.0) return 0.0;
  if (primitive_) return primitive_(t);
  return quad::adaptive_simpson(f_, 0.0, t, kPrimitiveTol);
}

double NonlinearitySpec::df(double t) const {
  if (t < 0.0) throw InvalidArgument("df: argument must be >= 0");
  if (derivative_) return derivative_(t);
  const double step = 1e-6 * std::max(1.0, t);
  if (t < step) return (f_(t + step) - f_(t)) / step;
  return (f_(t + step) - f_(t - step)) / (2.0 * step);
}

NonlinearitySpec NonlinearitySpec::with_envelope_eps(double eps) const {
  if (!(eps > 0.0)) throw InvalidArgument("with_envelope_eps: eps must be positive");
  NonlinearitySpec copy = *this;
  copy.envelope_ = fit_growth_envelope(*this, eps, envelope_samples(*this, eps));
  return copy;
}

ShiftedNonlinearity::ShiftedNonlinearity(NonlinearitySpec base, double a)
    : base_(std::move(base)), a_(a) {
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw InvalidArgument("ShiftedNonlinearity: shift a must be finite and >= 0");
  }
}

double eval_f(const NonlinearitySpec& spec, double t) { return spec.f(t); }
double eval_F(const NonlinearitySpec& spec, double t) { return spec.F(t); }
double eval_fa(const ShiftedNonlinearity& shifted, double t) { return shifted.fa(t); }
double eval_Fa(const ShiftedNonlinearity& shifted, double t) { return shifted.Fa(t); }
double eval_f0(const NonlinearitySpec& spec, double t) { return t > 0.0 ? spec.f(t) : 0.0; }

std::vector<double> default_samples() {
  std::vector<double> s = quad::logspace(1e-8, 1e4, 1201);
  s.insert(s.begin(), 0.0);
  return s;
}

GrowthEnvelope fit_growth_envelope(const NonlinearitySpec& spec, double eps,
                                   std::span<const double> samples) {
  if (samples.empty()) throw InvalidArgument("fit_growth_envelope: empty sample set");
  GrowthEnvelope env{eps, 0.0};
  const double q = spec.gamma() - 1.0;
  for (double t : samples) {
    if (!(t > 0.0)) continue;
    const double need = (spec.f(t) - eps * t) / std::pow(t, q);
    env.c = std::max(env.c, need);
  }
  // Keep the constant strictly positive; the bound itself is unaffected.
  env.c = std::max(env.c, 1e-300);
  return env;
}

std::pair<double, bool> empirical_cm(const NonlinearitySpec& spec, double m,
                                     std::span<const double> samples) {
  auto pos = positive_sorted(samples);
  if (pos.empty()) throw InvalidArgument("empirical_cm: empty sample set");
  double best = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const double v = m * pos[i] * pos[i] - spec.F(pos[i]);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  return {best, best > 0.0 && arg + 1 == pos.size()};
}

CheckReport check_f1(const NonlinearitySpec& spec, std::span<const double> samples) {
  const auto pos = require_samples(samples, "check_f1");
  CheckReport rep;
  rep.name = "f1";
  std::ostringstream msg;
  bool ok = true;

  const double crit = critical_exponent(spec.dim());
  if (!(spec.gamma() > 2.0 && spec.gamma() < crit)) {
    ok = false;
    msg << "gamma outside (2, 2**); ";
  }

  // f(t)/t -> 0 as t -> 0
  std::vector<double> small;
  for (double t : pos) {
    if (t <= 1e-3) small.push_back(t);
  }
  if (small.size() < 3) small.assign(pos.begin(), pos.begin() + 3);
  double prev = std::abs(spec.f(small.back()) / small.back());
  for (auto it = small.rbegin(); it != small.rend(); ++it) {
    const double ratio = std::abs(spec.f(*it) / *it);
    if (ratio > prev * (1.0 + 1e-9) + 1e-300) {
      ok = false;
      msg << "f(t)/t not decreasing toward 0 at t=" << *it << "; ";
      rep.witnesses.emplace_back(*it, ratio);
      break;
    }
    prev = ratio;
  }
  const double t0 = small.front();
  const double r0 = std::abs(spec.f(t0) / t0);
  rep.witnesses.emplace_back(t0, r0);
  if (r0 > 1e-3) {
    ok = false;
    msg << "f(t)/t = " << r0 << " at t=" << t0 << " does not approach 0; ";
  }

  // limsup f(t)/t^{gamma-1} <= C_f at the largest samples, without growth.
  const double big = pos.back();
  const double q = spec.gamma() - 1.0;
  const double tol = 1e-6;
  const double ratio_big = spec.f(big) / std::pow(big, q);
  bool first = true;
  double ratio_decade = 0.0;
  for (double t : pos) {
    if (t < big / 10.0) continue;
    const double ratio = spec.f(t) / std::pow(t, q);
    if (first) ratio_decade = ratio;
    first = false;
    if (ratio > spec.c_f() * (1.0 + tol)) {
      ok = false;
      msg << "f(t)/t^(gamma-1) = " << ratio << " exceeds C_f at t=" << t << "; ";
      rep.witnesses.emplace_back(t, ratio);
      break;
    }
  }
  rep.witnesses.emplace_back(big, ratio_big);
  if (ratio_big > ratio_decade * (1.0 + tol) + 1e-300) {
    ok = false;
    msg << "f(t)/t^(gamma-1) still growing over the last decade; ";
  }

  rep.passed = ok;
  rep.detail = ok ? "f(t)/t -> 0 near 0 and f(t)/t^(gamma-1) <= C_f at large t" : msg.str();
  return rep;
}

CheckReport check_f2(const NonlinearitySpec& spec, std::span<const double> samples,
                     double probe_m) {
  const auto pos = require_samples(samples, "check_f2");
  CheckReport rep;
  rep.name = "f2";
  const double big = pos.back();
  const auto ratio = [&](double t) { return spec.f(t) / t; };

  bool ok = true;
  std::ostringstream msg;
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : pos) {
    if (t < big / 100.0) continue;
    const double r = ratio(t);
    if (r < prev * (1.0 - 1e-12)) {
      ok = false;
      msg << "f(t)/t decreases at t=" << t << "; ";
      rep.witnesses.emplace_back(t, r);
      break;
    }
    prev = r;
  }
  const double r_big = ratio(big);
  const double r_low = ratio(big / 100.0);
  rep.witnesses.emplace_back(big / 100.0, r_low);
  rep.witnesses.emplace_back(big, r_big);
  if (!(r_big > r_low * (1.0 + 1e-3))) {
    ok = false;
    msg << "f(t)/t not growing over the last two decades; ";
  }
  if (!(r_big > probe_m)) {
    ok = false;
    msg << "f(t)/t = " << r_big << " below probe M = " << probe_m << "; ";
  }
  rep.passed = ok;
  rep.detail = ok ? "f(t)/t increasing and above the probe at large t" : msg.str();
  return rep;
}

CheckReport check_f3(const NonlinearitySpec& spec, std::span<const double> samples) {
  const auto pos = require_samples(samples, "check_f3");
  CheckReport rep;
  rep.name = "f3";
  rep.passed = true;
  double prev_t = 0.0;
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : pos) {
    if (t <= spec.r_mono()) continue;
    const double r = spec.f(t) / t;
    if (r < prev - 1e-12 * std::abs(prev) - 1e-14) {
      rep.passed = false;
      rep.witnesses.emplace_back(prev_t, prev);
      rep.witnesses.emplace_back(t, r);
      std::ostringstream msg;
      msg << "f(t)/t decreases between t=" << prev_t << " and t=" << t;
      rep.detail = msg.str();
      return rep;
    }
    prev = r;
    prev_t = t;
  }
  rep.detail = "f(t)/t non-decreasing on all samples beyond R";
  return rep;
}

CheckReport check_f4(const NonlinearitySpec& spec, std::span<const double> samples) {
  const auto pos = require_samples(samples, "check_f4");
  CheckReport rep;
  rep.name = "f4";
  bool ok = true;
  std::ostringstream msg;
  const auto max_quotient = [&](double k, int m) {
    double best = 0.0;
    double prev = spec.f(0.0);
    const double step = k / m;
    for (int i = 1; i <= m; ++i) {
      const double cur = spec.f(i * step);
      best = std::max(best, std::abs(cur - prev) / step);
      prev = cur;
    }
    return best;
  };
  for (double k : {1.0, 10.0, 100.0}) {
    if (k > pos.back()) break;
    const double coarse = max_quotient(k, 2000);
    const double fine = max_quotient(k, 16000);
    rep.witnesses.emplace_back(k, fine);
    if (!std::isfinite(fine) || fine > 1.05 * coarse + 1e-9) {
      ok = false;
      msg << "difference quotient on [0," << k << "] grows under refinement (" << coarse << " -> "
          << fine << "); ";
    }
  }
  rep.passed = ok;
  if (ok && !spec.lipschitz()) msg << "evidence of local Lipschitz continuity despite flag";
  rep.detail = ok ? (msg.str().empty() ? "difference quotients bounded on compacts" : msg.str())
                  : msg.str();
  return rep;
}

double check_primitive_gap(const ShiftedNonlinearity& shifted, double s, double t) {
  const bool positive = (0.0 < t && t <= s);
  const bool negative = (s <= t && t < 0.0);
  if (!positive && !negative) {
    throw InvalidArgument("check_primitive_gap: need 0 < t <= s or s <= t < 0");
  }
  const NonlinearitySpec& spec = shifted.base();
  const GrowthEnvelope& env = spec.envelope();
  const double r = spec.r_mono();
  const double c_r = 0.5 * env.eps * r * r + env.c / spec.gamma() * std::pow(r, spec.gamma());
  const double lhs = shifted.Fa(s) - shifted.Fa(t);
  const double rhs = (s * s - t * t) / (2.0 * s) * shifted.fa(s) + c_r;
  return lhs - rhs;
}

}  // namespace semipos
