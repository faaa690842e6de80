#pragma once

// Randomized algebraic invariants of the term algebra. Shared by the unit
// tests (small counts) and the acceptance binary (>= 1e4 cases).

#include <algorithm>
#include <string>
#include <vector>

#include "test_support.hpp"

namespace pbe::test {

struct PropertyTally {
  unsigned cases = 0;
  unsigned checks = 0;
  std::vector<std::string> failures;

  void check(bool ok, const std::string& what, const Expr& witness) {
    ++checks;
    if (!ok && failures.size() < 20) failures.push_back(what + " on " + witness.to_string());
  }
  bool ok() const { return failures.empty(); }
};

inline std::vector<Term> raw_terms(const Expr& e) { return e.terms(); }

inline void property_case(TermGenerator& gen, PropertyTally& tally) {
  ++tally.cases;
  const Expr a = gen.transformable();
  const Expr b = gen.transformable();
  const Rational s = gen.coeff();
  const unsigned w = gen.small(2);

  // normalize: idempotent and order-insensitive
  std::vector<Term> raw = raw_terms(a);
  for (const auto& t : b.terms()) {
    Term split = t;
    split.coeff /= 2;
    raw.push_back(split);
    raw.push_back(split);
  }
  std::shuffle(raw.begin(), raw.end(), gen.engine());
  const Expr n1 = normalize(raw);
  tally.check(normalize(raw_terms(n1)) == n1, "normalize idempotence", n1);
  tally.check(n1 == add(a, b), "normalize of concatenation equals add", n1);

  // vector space
  tally.check(add(a, scale(a, Rational(-1))).empty(), "additive inverse", a);
  tally.check(add(a, b) == add(b, a), "add commutes", a);
  tally.check(scale(add(a, b), s) == add(scale(a, s), scale(b, s)), "scale distributes", a);
  const Expr c = gen.transformable(2);
  tally.check(add(add(a, b), c) == add(a, add(b, c)), "add associates", c);

  // linear transforms commute with add and scale
  const Expr combo = add(a, scale(b, s));
  tally.check(tail_integral(combo, w) == add(tail_integral(a, w), scale(tail_integral(b, w), s)),
              "tail_integral linearity", combo);
  tally.check(time_antiderivative(combo) == add(time_antiderivative(a), scale(time_antiderivative(b), s)),
              "time_antiderivative linearity", combo);
  tally.check(shift_u_power(combo, w) == add(shift_u_power(a, w), scale(shift_u_power(b, w), s)),
              "shift_u_power linearity", combo);
  // rate-free delta terms have polynomial moments; the others are integrable
  const unsigned j = gen.small(2);
  TPoly sb = total_moment(b, j);
  TPoly scaled;
  for (const auto& [key, v] : sb.coeffs()) scaled.add(key.first, key.second, v * s);
  tally.check(total_moment(combo, j) == total_moment(a, j) + scaled, "total_moment linearity", combo);

  // convolution: bilinear and symmetric
  const Rational rate = gen.rate();
  const Expr x = gen.convolvable(rate, 3);
  const Expr y = gen.convolvable(rate, 3);
  const Expr z = gen.convolvable(rate, 2);
  tally.check(convolve(x, y) == convolve(y, x), "convolve symmetry", x);
  tally.check(convolve(add(x, scale(z, s)), y) == add(convolve(x, y), scale(convolve(z, y), s)),
              "convolve linearity (first)", z);
  tally.check(convolve(y, add(x, scale(z, s))) == add(convolve(y, x), scale(convolve(y, z), s)),
              "convolve linearity (second)", z);
}

inline PropertyTally run_term_properties(unsigned seed, unsigned count) {
  TermGenerator gen(seed);
  PropertyTally tally;
  for (unsigned i = 0; i < count; ++i) property_case(gen, tally);
  return tally;
}

/// Trapezoid with one Richardson step over [0, 60] of u^j * evaluate(term)
/// against total_moment at the same t. Returns the worst relative error.
inline double quadrature_consistency(unsigned seed, unsigned count) {
  TermGenerator gen(seed);
  const Rational t = make_rational(1, 2);
  double worst = 0.0;
  for (unsigned c = 0; c < count; ++c) {
    const Expr e = normalize({smooth(gen.coeff(), gen.small(3), gen.small(4), gen.rate())});
    const int n = 6000;  // coarse panels on [0, 60]
    std::vector<double> f(2 * n + 1);
    std::vector<Rational> us(2 * n + 1);
    for (int i = 0; i <= 2 * n; ++i) us[i] = make_rational(60L * i, 2L * n);
    const auto vals = evaluate_many(e, t, us);
    for (unsigned j = 0; j <= 2; ++j) {
      for (int i = 0; i <= 2 * n; ++i) f[i] = std::pow(to_double(us[i]), j) * vals[i].smooth;
      auto trap = [&](int stride) {
        const double h = 60.0 / (2 * n / stride);
        double s = 0.5 * (f.front() + f.back());
        for (int i = stride; i < 2 * n; i += stride) s += f[i];
        return s * h;
      };
      const double fine = trap(1), coarse = trap(2);
      const double integral = (4.0 * fine - coarse) / 3.0;
      const double exact = total_moment(e, j).evaluate(t);
      worst = std::max(worst, std::abs(integral - exact) / std::abs(exact));
    }
  }
  return worst;
}

}  // namespace pbe::test
