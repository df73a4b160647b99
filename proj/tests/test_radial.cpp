#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "semipos/error.hpp"
#include "semipos/quadrature.hpp"
#include "semipos/radial.hpp"
#include "support.hpp"

using namespace semipos;
using namespace semipos::testing;
using std::numbers::pi;

TEST_CASE("gauss-legendre rules") {
  for (int order : {1, 2, 5, 20, 64}) {
    const auto& rule = quad::gauss_legendre(order);
    REQUIRE(rule.nodes.size() == static_cast<std::size_t>(order));
    double sum = 0.0;
    for (double w : rule.weights) sum += w;
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
  }
  // Exact on random polynomials of degree 2n - 1.
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int order = 1 + static_cast<int>(rng() % 12);
    std::vector<double> coef(2 * order);
    for (double& c : coef) c = uniform(rng, -1.0, 1.0);
    const double a = uniform(rng, -2.0, 0.0);
    const double b = uniform(rng, 0.5, 2.0);
    const auto poly = [&](double x) {
      double v = 0.0;
      for (std::size_t k = coef.size(); k-- > 0;) v = v * x + coef[k];
      return v;
    };
    double exact = 0.0;
    for (std::size_t k = 0; k < coef.size(); ++k) {
      exact += coef[k] * (std::pow(b, k + 1.0) - std::pow(a, k + 1.0)) / (k + 1.0);
    }
    CHECK(quad::gauss(poly, a, b, order) == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("adaptive simpson against gauss-kronrod") {
  using boost::math::quadrature::gauss_kronrod;
  const auto f1 = [](double t) { return 2.0 * t * std::log1p(t); };
  const auto f2 = [](double t) { return std::exp(-t * t) * std::cos(3.0 * t); };
  const auto f3 = [](double t) { return std::sqrt(t); };
  CHECK(quad::adaptive_simpson(f1, 0.0, 5.0) ==
        doctest::Approx(gauss_kronrod<double, 31>::integrate(f1, 0.0, 5.0)).epsilon(1e-10));
  CHECK(quad::adaptive_simpson(f2, -1.0, 4.0) ==
        doctest::Approx(gauss_kronrod<double, 31>::integrate(f2, -1.0, 4.0)).epsilon(1e-9));
  CHECK(quad::adaptive_simpson(f3, 0.0, 1.0, 1e-12) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("logspace") {
  const auto v = quad::logspace(1e-3, 1e3, 7);
  REQUIRE(v.size() == 7);
  CHECK(v.front() == doctest::Approx(1e-3));
  CHECK(v.back() == doctest::Approx(1e3));
  CHECK(v[3] == doctest::Approx(1.0));
}

TEST_CASE("make_grid") {
  const RadialGrid g = make_grid(5, 16, 1.0);
  CHECK(g.size() == 16);
  CHECK(g.spacing() == doctest::Approx(1.0 / 15.0));
  CHECK(g.sphere_area() == doctest::Approx(8.0 * pi * pi / 3.0).epsilon(1e-14));
  CHECK(sphere_area(6) == doctest::Approx(pi * pi * pi).epsilon(1e-14));
  CHECK(make_grid(6, 64, 10.0).sphere_area() == doctest::Approx(31.00627668).epsilon(1e-9));
  CHECK_THROWS_AS(make_grid(4, 16, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(5, 8, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(5, 16, -1.0), InvalidArgument);
}

TEST_CASE("laplacian of polynomials and a gaussian") {
  for (int dim : {5, 6, 8}) {
    const RadialGrid g = make_grid(dim, 200, 4.0);
    const RadialField c = RadialField::from_function(g, [](double) { return 3.7; });
    CHECK(laplacian(c).max_abs() < 1e-10);
    const RadialField q = RadialField::from_function(g, [](double r) { return r * r; });
    const RadialField lq = laplacian(q);
    for (int i = 0; i < g.size(); ++i) CHECK(lq[i] == doctest::Approx(2.0 * dim).epsilon(1e-8));
  }

  // Second order: the error drops by ~4 when h halves.
  double prev = 0.0;
  for (int n : {201, 401, 801}) {
    const RadialGrid g = make_grid(5, n, 6.0);
    const RadialField u = RadialField::from_function(g, [](double r) { return std::exp(-r * r); });
    const RadialField lu = laplacian(u);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = g.r(i);
      err = std::max(err, std::abs(lu[i] - (4.0 * r * r - 10.0) * std::exp(-r * r)));
    }
    CHECK(err < 50.0 * g.spacing() * g.spacing());
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.15));
    prev = err;
  }
}

TEST_CASE("laplacian is linear") {
  Rng rng(11);
  const RadialGrid g = make_grid(7, 300, 10.0);
  for (int trial = 0; trial < 25; ++trial) {
    const RadialField u = random_field(g, rng);
    const RadialField v = random_field(g, rng);
    const double a = uniform(rng, -3.0, 3.0);
    const double b = uniform(rng, -3.0, 3.0);
    const RadialField lhs = laplacian(a * u + b * v);
    const RadialField rhs = a * laplacian(u) + b * laplacian(v);
    const double scale = std::max(1.0, lhs.max_abs());
    CHECK((lhs - rhs).max_abs() <= 1e-12 * scale);
  }
}

TEST_CASE("integrate") {
  const RadialGrid g = make_grid(5, 2001, 10.0);
  CHECK(integrate(RadialField(g)) == 0.0);
  const RadialField gauss = RadialField::from_function(g, [](double r) { return std::exp(-r * r); });
  CHECK(integrate(gauss) == doctest::Approx(std::pow(pi, 2.5)).epsilon(1e-6));

  const RadialGrid fine = make_grid(5, 20001, 2.0);
  const RadialField ball =
      RadialField::from_function(fine, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
  CHECK(integrate(ball) == doctest::Approx(8.0 * pi * pi / 15.0).epsilon(1e-3));

  // Refinement order for a field without even symmetry at the origin.
  const auto err = [](int n) {
    const RadialGrid gr = make_grid(5, n, 3.0);
    const RadialField u = RadialField::from_function(gr, [](double r) { return 1.0 / (1.0 + r); });
    const double exact = sphere_area(5) *
                         boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                             [](double r) { return std::pow(r, 4) / (1.0 + r); }, 0.0, 3.0);
    return std::abs(integrate(u) - exact);
  };
  const double ratio = err(101) / err(201);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("h2_inner") {
  Rng rng(5);
  const RadialGrid g = make_grid(5, 400, 12.0);
  const RadialField zero(g);
  for (int trial = 0; trial < 20; ++trial) {
    const RadialField u = random_field(g, rng);
    const RadialField v = random_field(g, rng);
    CHECK(h2_inner(zero, u) == 0.0);
    CHECK(h2_inner(u, v) == h2_inner(v, u));
    CHECK(h2_inner(u, u) >= 0.0);
  }
  const RadialField u = RadialField::from_function(g, [](double r) { return std::exp(-r * r); });
  const double oracle =
      sphere_area(5) * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                           [](double r) {
                             const double l = (4.0 * r * r - 10.0) * std::exp(-r * r);
                             return l * l * std::pow(r, 4);
                           },
                           0.0, 12.0);
  CHECK(h2_inner(u, u) == doctest::Approx(oracle).epsilon(0.01));
}

TEST_CASE("lp_norm") {
  const RadialGrid g = make_grid(5, 20001, 2.0);
  CHECK(lp_norm(RadialField(g), 2.0) == 0.0);
  const RadialField ball = RadialField::from_function(g, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
  CHECK(lp_norm(ball, 2.0) == doctest::Approx(std::sqrt(8.0 * pi * pi / 15.0)).epsilon(1e-3));
  RadialField u = RadialField::from_function(g, [](double r) { return std::sin(5.0 * r); });
  CHECK(lp_norm(u, kInfNorm) == u.max_abs());
  CHECK_THROWS_AS(lp_norm(u, 0.5), InvalidArgument);
}
