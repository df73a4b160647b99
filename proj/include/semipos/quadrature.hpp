#pragma once

#include <functional>
#include <span>
#include <vector>

namespace semipos::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `order` points, computed by Newton iteration on
/// P_n. Rules are cached per order; the reference stays valid for the
/// lifetime of the program.
const GaussRule& gauss_legendre(int order);

/// Integrate `f` over [a, b] with a fixed Gauss-Legendre rule.
double gauss(const std::function<double(double)>& f, double a, double b, int order);

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
/// Throws NumericalError if the recursion depth limit is hit with a
/// non-finite estimate.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 48);

/// `count` points logarithmically spaced on [lo, hi], inclusive.
std::vector<double> logspace(double lo, double hi, int count);

}  // namespace semipos::quad
