#include "pbe_djm/exact_solutions.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <string>

#include "pbe_djm/error.hpp"

namespace pbe {

namespace {

constexpr double kQuadTolerance = 1e-12;

bool theta(double u, double r) { return u <= r; }

template <class F>
double integrate(F f, double a, double b) {
  double error = 0.0;
  double l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-14, &error, &l1);
  if (!std::isfinite(value) || error > kQuadTolerance * std::max(1.0, std::abs(value)))
    throw Error(ErrorCode::QuadratureFailure, "estimated error " + std::to_string(error) + " over [" +
                                                  std::to_string(a) + ", " + std::to_string(b) + "]");
  return value;
}

}  // namespace

void validate(const ExactCase& c) {
  if (c.example_id < 1 || c.example_id > 4)
    throw Error(ErrorCode::UnknownExample, "no exact solution for problem " + std::to_string(c.example_id));
  const bool needs_radius = c.example_id >= 3;
  if (needs_radius != c.radius.has_value())
    throw Error(ErrorCode::InvalidArgument, needs_radius ? "radius required" : "radius not applicable");
  if (c.radius && !(*c.radius > 0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
}

PointValue eval_exact(const ExactCase& c, double t, double u) {
  validate(c);
  switch (c.example_id) {
    case 1: return {(1 + t) * (1 + t) * std::exp(-u * (1 + t)), 0.0};
    case 2: return {(1 + 2 * t + 2 * t * u) * std::exp(-u * (1 + t * u)), 0.0};
    case 3: {
      const double r = *c.radius;
      const double smooth = theta(u, r) ? std::exp(-u * t) * (2 * t + t * t * (r - u)) : 0.0;
      return {smooth, std::exp(-r * t)};
    }
    default: {
      const double r = *c.radius;
      const double smooth = theta(u, r) ? 2 * r * t * std::exp(-u * u * t) : 0.0;
      return {smooth, std::exp(-r * r * t)};
    }
  }
}

double example1_printed_limit(double t, double u) { return (1 + t * t) * std::exp(-u * (1 + t)); }

double exact_moment(const ExactCase& c, unsigned j, double t) {
  validate(c);
  if (j > 2) throw Error(ErrorCode::InvalidArgument, "moments are provided for j = 0, 1, 2");
  switch (c.example_id) {
    case 1: {
      // mu_j = (1+t)^2 j! / (1+t)^{j+1}
      const double s = 1 + t;
      return std::tgamma(j + 1.0) * s * s / std::pow(s, j + 1.0);
    }
    case 2: {
      auto f = [&](double u) { return std::pow(u, j) * eval_exact(c, t, u).smooth; };
      // exp(-u) dominates the decay; past 60 + 10j the tail is far below 1e-12.
      const double cut = 60.0 + 10.0 * j;
      return integrate(f, 0.0, cut / 2) + integrate(f, cut / 2, cut);
    }
    default: {
      const double r = *c.radius;
      auto f = [&](double u) { return std::pow(u, j) * eval_exact(c, t, u).smooth; };
      const double smooth = r > 0 ? integrate(f, 0.0, r) : 0.0;
      return smooth + std::pow(r, j) * eval_exact(c, t, r).dirac_coefficient;
    }
  }
}

}  // namespace pbe
