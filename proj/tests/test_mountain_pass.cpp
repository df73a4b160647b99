#include <cmath>

#include "doctest.h"
#include "semipos/error.hpp"
#include "semipos/mountain_pass.hpp"
#include "support.hpp"

using namespace semipos;
using namespace semipos::testing;

namespace {

const GeometryConstants& geometry() {
  static const GeometryConstants g =
      estimate_geometry(default_model(), NonlinearitySpec::paper_example(5));
  return g;
}

const MPSolution& positone() {
  static const MPSolution sol = mp_solve(
      default_model(), ShiftedNonlinearity(NonlinearitySpec::paper_example(5), 0.0), geometry());
  return sol;
}

NonlinearitySpec zero_f() {
  return NonlinearitySpec::custom(
      "zero", [](double) { return 0.0; }, [](double) { return 0.0; }, 5, 2.5, 1.0, 1.0, true,
      [](double) { return 0.0; });
}

}  // namespace

TEST_CASE("bump kinds") {
  CHECK(parse_bump_kind("gaussian") == BumpKind::Gaussian);
  CHECK(parse_bump_kind("polynomial_bump") == BumpKind::PolynomialBump);
  CHECK(to_string(BumpKind::PolynomialBump) == "polynomial_bump");
  CHECK_THROWS_AS(parse_bump_kind("box"), InvalidArgument);

  const Model& m = default_model();
  for (BumpKind kind : {BumpKind::Gaussian, BumpKind::PolynomialBump}) {
    const Potential phi = make_bump(m, kind);
    CHECK(std::sqrt(norm_sq(phi)) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(phi.u.min() >= 0.0);
    CHECK(phi.source.min() >= 0.0);
  }
}

TEST_CASE("find_vtilde") {
  const Model& m = default_model();
  const Potential phi = make_bump(m, BumpKind::Gaussian);
  const ShiftedNonlinearity s(NonlinearitySpec::paper_example(5), 0.01);
  const Potential v = find_vtilde(m, s, phi, geometry().rho);
  const double t = std::sqrt(norm_sq(v));
  CHECK(i_a(m, s, v) < 0.0);
  CHECK(t > geometry().rho);
  // t is a power-of-two multiple of 2 rho.
  const double k = std::log2(t / (2.0 * geometry().rho));
  CHECK(k == doctest::Approx(std::round(k)).epsilon(1e-9));

  // Level along the straight path t v: 0 at t = 0, negative at the end, an
  // interior maximum in between.
  double best = 0.0;
  double last = 0.0;
  for (int j = 0; j <= 64; ++j) {
    const double tau = j / 64.0;
    last = i_a(m, s, Potential{tau * v.u, tau * v.source});
    if (j == 0) CHECK(last == 0.0);
    best = std::max(best, last);
  }
  CHECK(last < 0.0);
  CHECK(best > 0.0);

  // Without superlinear growth the level never turns negative.
  const ShiftedNonlinearity none(zero_f(), 0.01);
  CHECK_THROWS_AS(find_vtilde(m, none, phi, 1.0), NumericalError);
}

TEST_CASE("positone solve") {
  const MPSolution& sol = positone();
  CHECK(sol.converged);
  CHECK(sol.rel_residual < 1e-4);
  CHECK(sol.level > 0.0);
  CHECK(sol.level >= geometry().beta - 1e-6);
  CHECK(sol.rim_ok);
  CHECK(sol.u.u.min() >= 0.0);
  CHECK(sol.residual <= 1e-4 * std::max(1.0, sol.norm_h2));

  // Endpoints of the final path are exactly 0 and vtilde.
  REQUIRE(sol.path.nodes.size() == 17);
  CHECK(sol.path.nodes.front().source.max_abs() == 0.0);
  CHECK((sol.path.nodes.back().source - sol.vtilde.source).max_abs() == 0.0);
  CHECK(sol.path.levels.front() == 0.0);
  CHECK(sol.path.levels.back() < 0.0);

  // Max level never rises across iterations.
  for (std::size_t k = 1; k < sol.history.size(); ++k) {
    CHECK(sol.history[k].level <= sol.history[k - 1].level * (1.0 + 1e-12));
  }
}

TEST_CASE("critical point certificate against random test fields") {
  const MPSolution& sol = positone();
  const Model& m = default_model();
  const ReducedEnergy red(m, ShiftedNonlinearity(NonlinearitySpec::paper_example(5), 0.0));
  const Eigen::VectorXd c = m.restrict_source(sol.u.source);
  const Eigen::VectorXd grad = red.gradient(c);
  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd v = random_coords(red.size(), rng);
    const double pairing = red.inner(grad, v);
    CHECK(std::abs(pairing) <= 1e-4 * std::max(1.0, sol.norm_h2) * red.norm(v));
  }
}

TEST_CASE("semipositone solve and warm start") {
  const Model& m = default_model();
  const auto spec = NonlinearitySpec::paper_example(5);
  const double a = 0.25 * geometry().a1;
  const MPSolution cold = mp_solve(m, ShiftedNonlinearity(spec, a), geometry());
  const MPSolution warm = mp_solve(m, ShiftedNonlinearity(spec, a), geometry(), {}, positone().u);
  CHECK(cold.converged);
  CHECK(warm.converged);
  CHECK(cold.level >= geometry().beta - 1e-6);
  CHECK(warm.level == doctest::Approx(cold.level).epsilon(1e-8));
  CHECK(warm.norm_h2 == doctest::Approx(cold.norm_h2).epsilon(1e-8));

  const MPSolution above = mp_solve(m, ShiftedNonlinearity(spec, 2.0 * geometry().a1), geometry());
  CHECK_FALSE(above.warnings.empty());
}

TEST_CASE("cerami diagnostics") {
  CHECK_THROWS_AS(cerami_diagnostics({}), InvalidArgument);
  CHECK_THROWS_AS(cerami_diagnostics(std::vector<IterateRecord>(9)), InvalidArgument);

  // u_k = k phi with constant residual: norms blow up, products do not decay.
  std::vector<IterateRecord> diverging;
  for (int k = 1; k <= 30; ++k) diverging.push_back({0.0, static_cast<double>(k), 1.0});
  const CeramiReport bad = cerami_diagnostics(diverging);
  CHECK_FALSE(bad.bounded_norms);
  CHECK_FALSE(bad.product_decay);

  std::vector<IterateRecord> settling;
  for (int k = 0; k < 30; ++k) settling.push_back({1.0, 5.0 + std::exp(-k), std::exp(-k)});
  const CeramiReport good = cerami_diagnostics(settling);
  CHECK(good.bounded_norms);
  CHECK(good.product_decay);

  MPConfig cfg;
  cfg.newton_polish = false;
  const MPSolution slow = mp_solve(default_model(),
                                   ShiftedNonlinearity(NonlinearitySpec::paper_example(5), 0.0),
                                   geometry(), cfg);
  if (slow.history.size() >= 10) CHECK(slow.cerami.bounded_norms);
}

TEST_CASE("mp_solve rejects bad configs") {
  MPConfig cfg;
  cfg.path_nodes = 5;
  CHECK_THROWS_AS(mp_solve(default_model(), ShiftedNonlinearity(NonlinearitySpec::paper_example(5), 0.0),
                           geometry(), cfg),
                  InvalidArgument);
}
