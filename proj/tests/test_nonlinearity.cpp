#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "semipos/error.hpp"
#include "semipos/nonlinearity.hpp"
#include "support.hpp"

using namespace semipos;
using namespace semipos::testing;
using boost::math::quadrature::gauss_kronrod;

namespace {

double oracle_F(const NonlinearitySpec& spec, double t) {
  return gauss_kronrod<double, 61>::integrate([&](double s) { return spec.f(s); }, 0.0, t, 15, 1e-14);
}

NonlinearitySpec linear_f() {
  return NonlinearitySpec::custom(
      "linear", [](double t) { return t; }, [](double t) { return 0.5 * t * t; }, 5, 2.5, 1.0, 1.0,
      true);
}

NonlinearitySpec cubic_f(double gamma) {
  return NonlinearitySpec::power(5, 1.0, 3.0, gamma);
}

}  // namespace

TEST_CASE("example nonlinearity values") {
  const auto spec = NonlinearitySpec::paper_example(5);
  CHECK(eval_f(spec, 0.0) == 0.0);
  CHECK(eval_f(spec, 1.0) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  CHECK(eval_F(spec, 1.0) == doctest::Approx(oracle_F(spec, 1.0)).epsilon(1e-12));
  CHECK(eval_F(spec, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  for (double t : {1e-6, 0.3, 2.0, 17.0, 350.0}) {
    CHECK(eval_F(spec, t) == doctest::Approx(oracle_F(spec, t)).epsilon(1e-11));
  }
}

TEST_CASE("shifted nonlinearity") {
  const auto spec = NonlinearitySpec::paper_example(5);
  const ShiftedNonlinearity s(spec, 0.3);
  CHECK(eval_fa(s, -7.0) == -0.3);
  CHECK(eval_f0(spec, -2.0) == 0.0);
  CHECK_THROWS_AS(ShiftedNonlinearity(spec, -0.1), InvalidArgument);

  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = log_uniform(rng, 1e-4, 10.0);
    const ShiftedNonlinearity sh(spec, a);
    const double t = log_uniform(rng, 1e-6, 1e3);
    CHECK(eval_fa(sh, t) == eval_f0(spec, t) - a);
    CHECK(eval_fa(sh, -t) == -a);
    // F_a(t) - F_a(-t) = F(t) - 2 a t
    CHECK(eval_Fa(sh, t) - eval_Fa(sh, -t) ==
          doctest::Approx(oracle_F(spec, t) - 2.0 * a * t).epsilon(1e-10));
  }
}

TEST_CASE("log_power primitive by quadrature") {
  const auto spec = NonlinearitySpec::log_power(5, 1.5, 2.0, 3.5);
  CHECK_FALSE(spec.has_closed_form_primitive());
  for (double t : {0.5, 3.0, 40.0}) {
    CHECK(spec.F(t) == doctest::Approx(oracle_F(spec, t)).epsilon(1e-9));
  }
}

TEST_CASE("hypothesis checkers") {
  const auto samples = default_samples();
  const auto spec = NonlinearitySpec::paper_example(5, 2.5);
  CHECK(check_f1(spec, samples).passed);
  CHECK(check_f2(spec, samples).passed);
  CHECK(check_f3(spec, samples).passed);
  CHECK(check_f4(spec, samples).passed);

  CHECK_FALSE(check_f2(linear_f(), samples).passed);
  CHECK_FALSE(check_f1(cubic_f(3.5), samples).passed);
  CHECK(check_f1(cubic_f(4.0), samples).passed);
  CHECK_THROWS_AS(NonlinearitySpec::paper_example(5, 10.0), InvalidArgument);
}

TEST_CASE("growth envelope bounds f on every sample") {
  const auto samples = default_samples();
  for (double gamma : {2.2, 2.5, 4.0, 8.0}) {
    const auto spec = NonlinearitySpec::paper_example(5, gamma);
    for (double eps : {0.1, 0.5, 5.0}) {
      const GrowthEnvelope env = fit_growth_envelope(spec, eps, samples);
      for (double t : samples) {
        const double bound = eps * t + env.c * std::pow(t, gamma - 1.0);
        CHECK(spec.f(t) <= bound * (1.0 + 1e-12) + 1e-300);
      }
    }
  }
}

TEST_CASE("empirical C_M is finite for each probe") {
  // Growth is only logarithmically superquadratic, so M = 100 needs t ~ e^100.
  std::vector<double> samples{0.0};
  for (int k = 0; k <= 2000; ++k) samples.push_back(std::pow(10.0, -8.0 + 68.0 * k / 2000.0));
  const auto spec = NonlinearitySpec::paper_example(5);
  for (double m : {1.0, 10.0, 100.0}) {
    const auto [cm, at_edge] = empirical_cm(spec, m, samples);
    CHECK(std::isfinite(cm));
    CHECK_FALSE(at_edge);
    for (double t : samples) CHECK(spec.F(t) > m * t * t - cm - 1e-9 * std::max(1.0, cm));
  }
}

TEST_CASE("primitive gap inequality") {
  const auto spec = NonlinearitySpec::paper_example(5);
  const ShiftedNonlinearity s(spec, 0.1);
  const double t0 = 3.0;
  const auto& env = spec.envelope();
  const double c_r = 0.5 * env.eps + env.c / spec.gamma();
  CHECK(check_primitive_gap(s, t0, t0) == doctest::Approx(-c_r).epsilon(1e-12));
  CHECK_THROWS_AS(check_primitive_gap(s, 1.0, 2.0), InvalidArgument);

  // Positive branch: f(t)/t is increasing, so the bound holds with room.
  Rng rng(33);
  double worst = -1e300;
  for (int k = 0; k < 10000; ++k) {
    double a = log_uniform(rng, 1e-3, 1e3);
    double b = log_uniform(rng, 1e-3, 1e3);
    if (a < b) std::swap(a, b);
    worst = std::max(worst, check_primitive_gap(s, a, b));
  }
  CHECK(worst <= 1e-10);

  // Negative branch is exact: lhs - rhs = a (s - t)^2 / (2|s|) - C_R, which
  // grows without bound in |s|.
  for (int k = 0; k < 1000; ++k) {
    double a = -log_uniform(rng, 1e-3, 1e3);
    double b = -log_uniform(rng, 1e-3, 1e3);
    if (a > b) std::swap(a, b);
    const double want = 0.1 * (a - b) * (a - b) / (2.0 * std::abs(a)) - c_r;
    CHECK(check_primitive_gap(s, a, b) == doctest::Approx(want).epsilon(1e-9).scale(c_r));
  }
  CHECK(check_primitive_gap(s, -1e4, -1.0) > 0.0);
}
