#include "pbe_djm/djm_engine.hpp"

#include <algorithm>
#include <string>

#include "pbe_djm/error.hpp"

namespace pbe {

namespace {

void check_convolvable(const Expr& e) {
  if (e.empty()) return;
  const Rational& rate = e.terms().front().exp_rate;
  for (const auto& t : e.terms()) {
    if (t.dist != DistFactor::One)
      throw Error(ErrorCode::UnsupportedClass, "aggregation needs smooth initial data");
    if (t.exp_rate != rate) throw Error(ErrorCode::MixedRates, "aggregation needs a single exponential rate");
    if (t.exp_rate == 0) throw Error(ErrorCode::DivergentMoment, "aggregation needs integrable initial data");
  }
}

Rational sign(unsigned m) { return m % 2 ? Rational(-1) : Rational(1); }

}  // namespace

ProblemSpec make_problem(unsigned selection_power, Aggregation aggregation, Expr initial) {
  if (selection_power == 0) throw Error(ErrorCode::InvalidArgument, "selection power must be positive");
  if (aggregation == Aggregation::ConstantUnit) check_convolvable(initial);
  ProblemSpec spec;
  spec.selection_power = selection_power;
  spec.aggregation = aggregation;
  spec.has_radius = initial.references_radius();
  spec.initial = std::move(initial);
  return spec;
}

ProblemSpec example_problem(int example_id) {
  const Expr exp_u = monomial(1, 0, 0, 0, 1);
  const Expr delta = monomial(1, 0, 0, 0, 0, DistFactor::DiracAtR);
  switch (example_id) {
    case 1: return make_problem(1, Aggregation::None, exp_u);
    case 2: return make_problem(2, Aggregation::None, exp_u);
    case 3: return make_problem(1, Aggregation::None, delta);
    case 4: return make_problem(2, Aggregation::None, delta);
    case 5: return make_problem(1, Aggregation::ConstantUnit, exp_u);
    case 6: return make_problem(1, Aggregation::ConstantUnit, monomial(4, 0, 1, 0, 2));
    default: throw Error(ErrorCode::UnknownExample, "no reference problem " + std::to_string(example_id));
  }
}

// int_0^v (2/v) du = 2 and int_0^v u (2/v) du = v.
Rational fragments_per_breakage() { return 2; }
Rational volume_fraction_per_breakage() { return 1; }

Expr breakage_rhs(const ProblemSpec& spec, const Expr& c) {
  const unsigned k = spec.selection_power;
  Expr birth = scale(tail_integral(c, k - 1), Rational(2));
  return subtract(birth, shift_u_power(c, k));
}

Expr aggregation_operator(const Expr& c) {
  return subtract(scale(convolve(c, c), Rational(1, 2)), mul_tpoly(c, total_moment(c, 0)));
}

Expr aggregation_increment(const Expr& c_m, const Expr& sum_m, const Expr& sum_prev) {
  // N(S_m) - N(S_{m-1}) with S_m = S_{m-1} + c_m:
  //   1/2 c_m * (S_m + S_{m-1}) - c_m mu0(S_m) - S_{m-1} mu0(c_m)
  Expr birth = scale(convolve(c_m, add(sum_m, sum_prev)), Rational(1, 2));
  Expr death = add(mul_tpoly(c_m, total_moment(sum_m, 0)), mul_tpoly(sum_prev, total_moment(c_m, 0)));
  return subtract(birth, death);
}

Expr aggregation_G(const ProblemSpec& spec, std::span<const Expr> components) {
  if (spec.aggregation == Aggregation::None || components.empty()) return {};
  Expr sum_prev;
  for (std::size_t i = 0; i + 1 < components.size(); ++i) sum_prev = add(sum_prev, components[i]);
  const Expr& c_m = components.back();
  return aggregation_increment(c_m, add(sum_prev, c_m), sum_prev);
}

Expr next_component(const ProblemSpec& spec, const SeriesSolution& series) {
  if (series.components.empty()) throw Error(ErrorCode::InvalidArgument, "series has no c_0");
  const std::size_t m = series.components.size() - 1;
  const Expr& c_m = series.components[m];
  Expr rhs = breakage_rhs(spec, c_m);
  if (spec.aggregation == Aggregation::ConstantUnit) {
    const Expr& sum_m = series.partial_sums[m];
    const Expr sum_prev = m == 0 ? Expr{} : series.partial_sums[m - 1];
    rhs = add(rhs, aggregation_increment(c_m, sum_m, sum_prev));
  }
  return time_antiderivative(rhs);
}

namespace {

struct Degrees {
  std::size_t t = 0, u = 0, r = 0;
};

Degrees degrees(const Expr& e) {
  Degrees d;
  for (const auto& term : e.terms()) {
    d.t = std::max<std::size_t>(d.t, term.t_pow);
    d.u = std::max<std::size_t>(d.u, term.u_pow);
    d.r = std::max<std::size_t>(d.r, term.r_pow);
  }
  return d;
}

// Upper bound on the term count of the next aggregation component: all its
// terms share one rate, so distinct keys are limited by the degree box that
// c_m * S_m can reach. Checked before the (quadratic) work is done.
std::size_t next_term_bound(const SeriesSolution& series) {
  const Degrees c = degrees(series.components.back());
  const Degrees s = degrees(series.partial_sums.back());
  const std::size_t k = series.spec.selection_power;
  const std::size_t t = c.t + s.t + 1;
  const std::size_t u = std::max(c.u + s.u + 1, c.u + k);
  const std::size_t r = c.r + s.r;
  return (t + 1) * (u + 1) * (r + 1);
}

}  // namespace

void extend_series(SeriesSolution& series, std::size_t n, const SeriesOptions& options) {
  if (series.components.empty()) {
    series.components.push_back(series.spec.initial);
    series.partial_sums.push_back(series.spec.initial);
  }
  while (series.order() < n) {
    if (series.spec.aggregation == Aggregation::ConstantUnit) {
      if (const std::size_t bound = next_term_bound(series); bound > options.term_cap)
        throw Error(ErrorCode::TermBlowup, "c_" + std::to_string(series.order() + 1) + " may reach " +
                                               std::to_string(bound) + " terms (cap " +
                                               std::to_string(options.term_cap) + ")");
    }
    Expr next = next_component(series.spec, series);
    if (next.size() > options.term_cap)
      throw Error(ErrorCode::TermBlowup, "c_" + std::to_string(series.order() + 1) + " has " +
                                             std::to_string(next.size()) + " terms (cap " +
                                             std::to_string(options.term_cap) + ")");
    Expr phi = add(series.partial_sums.back(), next);
    series.components.push_back(std::move(next));
    series.partial_sums.push_back(std::move(phi));
  }
}

SeriesSolution compute_series(const ProblemSpec& spec, std::size_t n, const SeriesOptions& options) {
  SeriesSolution series{spec, {}, {}};
  extend_series(series, n, options);
  return series;
}

Expr closed_form_term(int example_id, unsigned m) {
  std::vector<Term> raw;
  auto push = [&](Rational c, unsigned t, unsigned u, unsigned r, Rational rate, DistFactor d) {
    if (c != 0) raw.push_back(Term{std::move(c), t, u, r, std::move(rate), d});
  };
  const Rational one = 1, zero = 0;
  switch (example_id) {
    case 1: {
      // (-t)^m u^{m-2} e^{-u} (u^2 - 2mu + m(m-1)) / m!
      const Rational c = sign(m) / factorial(m);
      push(c, m, m, 0, one, DistFactor::One);
      if (m >= 1) push(c * (-2 * static_cast<long>(m)), m, m - 1, 0, one, DistFactor::One);
      if (m >= 2) push(c * (static_cast<long>(m) * (m - 1)), m, m - 2, 0, one, DistFactor::One);
      break;
    }
    case 2: {
      // (-t)^m u^{2m-2} e^{-u} (u^2 - 2mu - 2m) / m!
      if (m == 0) {
        push(one, 0, 0, 0, one, DistFactor::One);
        break;
      }
      const Rational c = sign(m) / factorial(m);
      const long two_m = 2 * static_cast<long>(m);
      push(c, m, 2 * m, 0, one, DistFactor::One);
      push(c * -two_m, m, 2 * m - 1, 0, one, DistFactor::One);
      push(c * -two_m, m, 2 * m - 2, 0, one, DistFactor::One);
      break;
    }
    case 3: {
      // delta (-ut)^m/m! + 2t theta (-ut)^{m-1}/(m-1)! + (-ut)^{m-2}/(m-2)! t^2 (r-u) theta
      push(sign(m) / factorial(m), m, m, 0, zero, DistFactor::DiracAtR);
      if (m >= 1) push(2 * sign(m - 1) / factorial(m - 1), m, m - 1, 0, zero, DistFactor::ThetaBelowR);
      if (m >= 2) {
        const Rational c = sign(m - 2) / factorial(m - 2);
        push(c, m, m - 2, 1, zero, DistFactor::ThetaBelowR);
        push(-c, m, m - 1, 0, zero, DistFactor::ThetaBelowR);
      }
      break;
    }
    case 4: {
      // delta (-u^2 t)^m/m! + 2rt theta (-u^2 t)^{m-1}/(m-1)!
      push(sign(m) / factorial(m), m, 2 * m, 0, zero, DistFactor::DiracAtR);
      if (m >= 1) push(2 * sign(m - 1) / factorial(m - 1), m, 2 * m - 2, 1, zero, DistFactor::ThetaBelowR);
      break;
    }
    default:
      throw Error(ErrorCode::UnknownExample, "no closed-form general term for problem " + std::to_string(example_id));
  }
  return normalize(std::move(raw));
}

}  // namespace pbe
