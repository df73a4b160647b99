#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace semipos {

/// Sample-based evidence for one hypothesis. `witnesses` holds the (t, value)
/// pairs the verdict rests on; it never constitutes a proof.
struct CheckReport {
  std::string name;
  bool passed = false;
  std::string detail;
  std::vector<std::pair<double, double>> witnesses;
};

/// Upper envelope f(t) <= eps t + c t^{gamma-1} on t >= 0, with c the least
/// constant that works on the sample set.
struct GrowthEnvelope {
  double eps = 0.0;
  double c = 0.0;
};

/// Critical exponent 2N/(N-4).
double critical_exponent(int dim);

/// The nonlinearity f on t >= 0 with f(0) = 0, plus its growth metadata.
class NonlinearitySpec {
 public:
  using Fn = std::function<double(double)>;

  /// f(t) = 2 t ln(1 + t) with closed-form primitive.
  static NonlinearitySpec paper_example(int dim, double gamma = 2.5, double c_f = 1.0,
                                        double r_mono = 1.0);
  /// f(t) = coef t^p (p >= 1), closed-form primitive.
  static NonlinearitySpec power(int dim, double coef, double p, double gamma, double c_f = 1.0,
                                double r_mono = 1.0);
  /// f(t) = coef t^p ln(1 + t) (p >= 1); primitive by adaptive quadrature
  /// unless p == 1.
  static NonlinearitySpec log_power(int dim, double coef, double p, double gamma,
                                    double c_f = 1.0, double r_mono = 1.0);
  /// Arbitrary f; pass an empty `primitive` to integrate numerically.
  static NonlinearitySpec custom(std::string name, Fn f, Fn primitive, int dim, double gamma,
                                 double c_f, double r_mono, bool lipschitz, Fn derivative = {});

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return dim_; }
  double gamma() const noexcept { return gamma_; }
  double c_f() const noexcept { return c_f_; }
  double r_mono() const noexcept { return r_mono_; }
  bool lipschitz() const noexcept { return lipschitz_; }
  bool has_closed_form_primitive() const noexcept { return static_cast<bool>(primitive_); }

  /// f(t); t must be >= 0.
  double f(double t) const;
  /// F(t) = int_0^t f; t must be >= 0.
  double F(double t) const;
  /// f'(t) for t >= 0; central difference when no closed form is registered.
  double df(double t) const;

  /// Registered envelope (eps, c); eps defaults to 0.5.
  const GrowthEnvelope& envelope() const noexcept { return envelope_; }
  /// Copy with the envelope refitted for a different eps.
  NonlinearitySpec with_envelope_eps(double eps) const;

 private:
  NonlinearitySpec(std::string name, Fn f, Fn primitive, Fn derivative, int dim, double gamma,
                   double c_f, double r_mono, bool lipschitz);

  std::string name_;
  Fn f_;
  Fn primitive_;
  Fn derivative_;
  int dim_;
  double gamma_;
  double c_f_;
  double r_mono_;
  bool lipschitz_;
  GrowthEnvelope envelope_;
};

/// f shifted by the semipositone constant: f_a(t) = f(t) - a for t >= 0 and
/// -a for t <= 0. a = 0 is accepted and yields the positone limit f_0.
class ShiftedNonlinearity {
 public:
  ShiftedNonlinearity(NonlinearitySpec base, double a);

  const NonlinearitySpec& base() const noexcept { return base_; }
  double a() const noexcept { return a_; }

  double fa(double t) const { return t > 0.0 ? base_.f(t) - a_ : -a_; }
  /// f_a'(t); zero for t < 0.
  double dfa(double t) const { return t > 0.0 ? base_.df(t) : 0.0; }
  double Fa(double t) const { return t > 0.0 ? base_.F(t) - a_ * t : -a_ * t; }

 private:
  NonlinearitySpec base_;
  double a_;
};

double eval_f(const NonlinearitySpec& spec, double t);
double eval_F(const NonlinearitySpec& spec, double t);
double eval_fa(const ShiftedNonlinearity& shifted, double t);
double eval_Fa(const ShiftedNonlinearity& shifted, double t);
/// f_0(t) = f(t) for t >= 0, 0 otherwise.
double eval_f0(const NonlinearitySpec& spec, double t);

/// {0} plus a dense logarithmic grid on [1e-8, 1e4].
std::vector<double> default_samples();

/// Least c with f(t) <= eps t + c t^{gamma-1} on the samples.
GrowthEnvelope fit_growth_envelope(const NonlinearitySpec& spec, double eps,
                                   std::span<const double> samples);

/// Minimal empirical C_M with F(t) > M t^2 - C_M on the samples. The second
/// member is true when the maximizer sits at the largest sample, in which
/// case the constant is not yet saturated on the sampled range.
std::pair<double, bool> empirical_cm(const NonlinearitySpec& spec, double m,
                                     std::span<const double> samples);

CheckReport check_f1(const NonlinearitySpec& spec, std::span<const double> samples);
CheckReport check_f2(const NonlinearitySpec& spec, std::span<const double> samples,
                     double probe_m = 10.0);
CheckReport check_f3(const NonlinearitySpec& spec, std::span<const double> samples);
CheckReport check_f4(const NonlinearitySpec& spec, std::span<const double> samples);

/// lhs - rhs of F_a(s) - F_a(t) <= (s^2 - t^2)/(2s) f_a(s) + C_R with
/// C_R = (eps/2) R^2 + (c/gamma) R^gamma from the registered envelope.
/// Requires 0 < t <= s or s <= t < 0.
double check_primitive_gap(const ShiftedNonlinearity& shifted, double s, double t);

}  // namespace semipos
