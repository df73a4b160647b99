#include <Eigen/Eigenvalues>
#include <cmath>

#include "doctest.h"
#include "semipos/energy.hpp"
#include "semipos/error.hpp"
#include "support.hpp"

using namespace semipos;
using namespace semipos::testing;

namespace {

// Frozen from the first verified run (N = 5, n = 512, r_max = 20, d = 1 on [0.5, 0.9]).
constexpr double kRhoStar = 19433411.090853818;
constexpr double kBeta = 15735727775450.736;
constexpr double kA1 = 2536040.7770824181;

const GeometryConstants& default_geometry() {
  static const GeometryConstants g =
      estimate_geometry(default_model(), NonlinearitySpec::paper_example(5));
  return g;
}

double directional_fd(const Model& model, const ShiftedNonlinearity& s, const RadialField& u,
                      const RadialField& v, double h) {
  return (i_a(model, s, u + h * v) - i_a(model, s, u - h * v)) / (2.0 * h);
}

}  // namespace

TEST_CASE("model support operator") {
  const Model& m = default_model();
  REQUIRE(m.support_size() > 0);
  for (int j : m.support()) CHECK(m.g()[j] > 0.0);
  const Eigen::MatrixXd gram = m.support_volume().asDiagonal() * m.support_operator();
  CHECK((gram - gram.transpose()).norm() <= 1e-12 * gram.norm());
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (gram + gram.transpose()))
            .eigenvalues()
            .minCoeff() > 0.0);

  Rng rng(2);
  const Eigen::VectorXd c = random_coords(m.support_size(), rng);
  const Potential p = m.expand(c);
  CHECK((m.restrict_source(p.source) - c).norm() == 0.0);
  CHECK_THROWS_AS(m.restrict_source(RadialField::from_function(m.grid(), [](double) { return 1.0; })),
                  InvalidArgument);
}

TEST_CASE("energy at zero and on negative fields") {
  const Model& m = default_model();
  const auto spec = NonlinearitySpec::paper_example(5);
  Rng rng(4);
  for (double a : {0.0, 0.01, 1.0}) {
    const ShiftedNonlinearity s(spec, a);
    CHECK(i_a(m, s, RadialField(m.grid())) == 0.0);
    for (int trial = 0; trial < 10; ++trial) {
      const RadialField u = -1.0 * random_field(m.grid(), rng, true);
      CHECK(n_a(m, s, u) == doctest::Approx(-a * integrate(hadamard(m.g(), u))).epsilon(1e-13));
      CHECK(n_a(m, s, u) >= 0.0);
      CHECK(i_a(m, s, u) > 0.0);
    }
  }
}

TEST_CASE("n_a splits into F and the linear shift on nonnegative fields") {
  const Model& m = default_model();
  const auto spec = NonlinearitySpec::paper_example(5);
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = log_uniform(rng, 1e-3, 10.0);
    const RadialField u = random_field(m.grid(), rng, true);
    RadialField fu(m.grid());
    for (int i = 0; i < u.size(); ++i) fu[i] = spec.F(u[i]);
    const double want = integrate(hadamard(m.g(), fu)) - a * integrate(hadamard(m.g(), u));
    CHECK(n_a(m, ShiftedNonlinearity(spec, a), u) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("energy identity and G scaling") {
  const Model& m = default_model();
  const auto spec = NonlinearitySpec::paper_example(5);
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const ShiftedNonlinearity s(spec, log_uniform(rng, 1e-3, 1.0));
    const RadialField u = random_field(m.grid(), rng);
    const double lhs = i_a(m, s, u);
    const double rhs = 0.5 * h2_inner(u, u) - n_a(m, s, u);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
    const double c = uniform(rng, -3.0, 3.0);
    CHECK(big_g(m, c * u) == doctest::Approx(c * c * big_g(m, u)).epsilon(1e-13));
  }
}

TEST_CASE("directional derivative matches the weak pairing") {
  const Model& m = default_model();
  const auto spec = NonlinearitySpec::paper_example(5);
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const ShiftedNonlinearity s(spec, log_uniform(rng, 1e-2, 1.0));
    const RadialField u = random_field(m.grid(), rng);
    const RadialField v = random_field(m.grid(), rng);
    const double d1 = directional_fd(m, s, u, v, 1e-3);
    const double d2 = directional_fd(m, s, u, v, 1e-4);
    const double extrap = (100.0 * d2 - d1) / 99.0;
    const double want = i_a_derivative(m, s, u, v);
    CHECK(std::abs(extrap - want) <= 1e-5 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("reduced energy agrees with the potential form") {
  const Model& m = default_model();
  const auto spec = NonlinearitySpec::paper_example(5);
  const ShiftedNonlinearity s(spec, 0.5);
  const ReducedEnergy red(m, s);
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd c = random_coords(red.size(), rng, -5.0, 20.0);
    const Potential p = m.expand(c);
    CHECK(red.value(c) == doctest::Approx(i_a(m, s, p)).epsilon(1e-12));
    CHECK(red.norm(c) * red.norm(c) == doctest::Approx(norm_sq(p)).epsilon(1e-12));
    const EnergyReport rep = energy_report(m, s, p);
    CHECK(rep.value == doctest::Approx(0.5 * rep.norm_h2 * rep.norm_h2 - rep.nonlinear_term).epsilon(1e-12));
    CHECK(rep.grad_residual == doctest::Approx(red.norm(red.gradient(c))).epsilon(1e-10));

    // Jacobian against central differences.
    const Eigen::MatrixXd jac = red.gradient_jacobian(c);
    const double h = 1e-6 * std::max(1.0, c.norm());
    for (int k = 0; k < red.size(); ++k) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(red.size());
      e(k) = h;
      const Eigen::VectorXd fd = (red.gradient(c + e) - red.gradient(c - e)) / (2.0 * h);
      CHECK((fd - jac.col(k)).norm() <= 1e-5 * std::max(1.0, jac.col(k).norm()));
    }
  }
}

TEST_CASE("gradient map at zero") {
  const Model& m = default_model();
  const auto spec = NonlinearitySpec::paper_example(5);
  const RadialField zero(m.grid());
  const GradientMap g0 = gradient_map(m, ShiftedNonlinearity(spec, 0.0), zero);
  CHECK(g0.t_u.u.max_abs() == 0.0);
  CHECK(g0.residual == 0.0);

  const double a = 0.25;
  const GradientMap ga = gradient_map(m, ShiftedNonlinearity(spec, a), zero);
  CHECK(ga.t_u.u.max() < 0.0);
  const RadialField expect = riesz_solve(m.riesz(), -a * m.g()).u;
  CHECK((ga.t_u.u - expect).max_abs() <= 1e-14 * expect.max_abs());
  CHECK(ga.residual == doctest::Approx(std::sqrt(h2_inner(ga.t_u.u, ga.t_u.u))).epsilon(1e-12));
}

TEST_CASE("B_g: zero weight, homogeneity, dense eigen oracle") {
  const RadialGrid grid = make_grid(5, 128, 20.0);
  CHECK(estimate_bg(Model(grid, WeightSpec::zero(5))) == 0.0);

  const Model& m = coarse_model();
  const double bg = estimate_bg(m);
  const Model scaled(grid, example_weight().scaled(2.5));
  CHECK(estimate_bg(scaled) == doctest::Approx(2.5 * bg).epsilon(1e-9));

  // sup int g u^2 / ||Lap u||^2 as a dense generalized symmetric eigenproblem
  // K c = lambda M c on the support coordinates.
  const Eigen::MatrixXd& a = m.support_operator();
  const Eigen::VectorXd& vol = m.support_volume();
  const Eigen::VectorXd& gs = m.support_weight();
  Eigen::MatrixXd mm = vol.asDiagonal() * a;
  mm = 0.5 * (mm + mm.transpose()).eval();
  Eigen::MatrixXd kk = a.transpose() * (vol.array() * gs.array()).matrix().asDiagonal() * a;
  kk = 0.5 * (kk + kk.transpose()).eval();
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(kk, mm);
  CHECK(bg == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(0.01));
}

TEST_CASE("estimate_a1 monotonicity and collapse") {
  GeometryInputs in{0.02, 10.0, 1e-3, 0.3, 2.5};
  const GeometryConstants base = estimate_a1(in);
  CHECK(base.rho > 0.0);
  CHECK(base.rho < base.rho1);
  CHECK(geometry_a(in, base.rho1) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(base.beta == doctest::Approx(geometry_a(in, base.rho) - base.a1 * in.c_lin * base.rho));

  GeometryInputs doubled = in;
  doubled.c_gamma *= 2.0;
  CHECK(estimate_a1(doubled).rho1 < base.rho1);

  // Near the eps cap with a huge c_gamma the admissible range shrinks to nothing.
  GeometryInputs tight = in;
  tight.eps = 0.999999 / in.b_g;
  double prev = estimate_a1(tight).a1;
  for (double c : {1.0, 1e3, 1e6}) {
    tight.c_gamma = c;
    const double a1 = estimate_a1(tight).a1;
    CHECK(a1 < prev);
    prev = a1;
  }
  CHECK(prev < 1e-12);
  tight.eps = 1.0 / in.b_g;
  CHECK_THROWS_AS(estimate_a1(tight), NumericalError);
}

TEST_CASE("geometry regression on the default model") {
  const GeometryConstants& g = default_geometry();
  CHECK(g.rho == doctest::Approx(kRhoStar).epsilon(1e-6));
  CHECK(g.beta == doctest::Approx(kBeta).epsilon(1e-6));
  CHECK(g.a1 == doctest::Approx(kA1).epsilon(1e-6));
  CHECK(g.eps < g.eps_cap);
  CHECK(g.eps_cap == doctest::Approx(1.0 / g.b_g));
}

TEST_CASE("rim estimate on S_rho") {
  const Model& m = default_model();
  const GeometryConstants& geo = default_geometry();
  const auto spec = NonlinearitySpec::paper_example(5);
  Rng rng(14);
  for (double frac : {0.0, 0.25, 0.5, 0.99}) {
    const ReducedEnergy red(m, ShiftedNonlinearity(spec, frac * geo.a1));
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd c = random_coords(red.size(), rng, trial % 2 ? 0.0 : -1.0, 1.0);
      c *= geo.rho / red.norm(c);
      CHECK(red.value(c) >= geo.beta * (1.0 - 1e-9));
    }
  }
}

TEST_CASE("e_gamma and c_lin") {
  const Model& m = coarse_model();
  const double e1 = estimate_e_gamma(m, 2.5, 1);
  CHECK(e1 > 0.0);
  CHECK(estimate_e_gamma(m, 2.5, 1) == e1);
  // c_lin is attained at the potential of g: check against random competitors.
  const double c_lin = estimate_c_lin(m);
  const ReducedEnergy red(m, ShiftedNonlinearity(NonlinearitySpec::paper_example(5), 0.0));
  Rng rng(16);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd c = random_coords(red.size(), rng);
    const Eigen::VectorXd u = red.field(c);
    const double lin = (m.support_volume().array() * m.support_weight().array() * u.array().abs()).sum();
    CHECK(lin <= c_lin * red.norm(c) * (1.0 + 1e-10));
  }
}

TEST_CASE("lower_bound_beta1") {
  CHECK(lower_bound_beta1({3.5}) == 3.5);
  CHECK(lower_bound_beta1({3.5, 1.25, 9.0}) == 1.25);
  CHECK_THROWS_AS(lower_bound_beta1({}), InvalidArgument);
}
