#pragma once

// Exact arithmetic on finite sums of terms
//
//     coeff * t^a * u^b * r^c * exp(-lambda*u) * D,   D in {1, delta(u-r), theta(r-u)}
//
// with rational coefficients and rates. Every iterate of the series solver for
// the in-scope kernels stays inside this class, so all transforms below are
// closed-form and exact. Floating point appears only at the end of evaluate().

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pbe_djm/rational.hpp"

namespace pbe {

enum class DistFactor : int {
  One = 0,
  DiracAtR = 1,    // delta(u - r)
  ThetaBelowR = 2  // theta(r - u)
};

struct Term {
  Rational coeff;
  unsigned t_pow = 0;
  unsigned u_pow = 0;
  unsigned r_pow = 0;
  Rational exp_rate;  // lambda in exp(-lambda*u), >= 0
  DistFactor dist = DistFactor::One;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Ordering key (dist, exp_rate, t_pow, u_pow, r_pow); ignores coeff.
bool key_less(const Term& a, const Term& b);
bool same_key(const Term& a, const Term& b);

/// Polynomial in (t, r) keyed by (t_pow, r_pow). Zero coefficients are never
/// stored, so the zero polynomial is the empty map.
class TPoly {
 public:
  using Key = std::pair<unsigned, unsigned>;

  TPoly() = default;
  TPoly(std::initializer_list<std::pair<const Key, Rational>> init);

  void add(unsigned t_pow, unsigned r_pow, const Rational& c);
  Rational coeff(unsigned t_pow, unsigned r_pow) const;

  bool is_zero() const { return coeffs_.empty(); }
  std::size_t size() const { return coeffs_.size(); }
  const std::map<Key, Rational>& coeffs() const { return coeffs_; }

  double evaluate(const Rational& t, const Rational& r = Rational(0)) const;
  Rational evaluate_exact(const Rational& t, const Rational& r = Rational(0)) const;

  std::string to_string() const;

  friend bool operator==(const TPoly&, const TPoly&) = default;
  friend TPoly operator+(const TPoly& a, const TPoly& b);
  friend TPoly operator-(const TPoly& a, const TPoly& b);
  friend TPoly operator*(const TPoly& a, const TPoly& b);

 private:
  std::map<Key, Rational> coeffs_;
};

/// Canonical finite sum of terms. Immutable once built; construct through
/// normalize() or the helpers below.
class Expr {
 public:
  Expr() = default;

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  bool references_radius() const;
  unsigned max_t_pow() const;

  std::string to_string() const;

  friend bool operator==(const Expr&, const Expr&) = default;

 private:
  friend Expr normalize(std::vector<Term> raw);
  std::vector<Term> terms_;
};

/// Sorts, sifts u-powers on delta terms into r-powers, merges like terms and
/// drops zeros. normalize(x.terms()) == x for every Expr x.
Expr normalize(std::vector<Term> raw);

/// Single-term convenience constructor.
Expr monomial(const Rational& coeff, unsigned t_pow, unsigned u_pow, unsigned r_pow = 0,
              const Rational& exp_rate = Rational(0), DistFactor dist = DistFactor::One);

Expr add(const Expr& a, const Expr& b);
Expr scale(const Expr& a, const Rational& s);
Expr subtract(const Expr& a, const Expr& b);

Expr mul_tpoly(const Expr& a, const TPoly& p);

/// Multiplies by u^k; on delta terms the power lands on r.
Expr shift_u_power(const Expr& a, unsigned k);

/// integral_u^inf v^w a(t, v) dv.
Expr tail_integral(const Expr& a, unsigned w);

/// integral_0^u a(t, v) b(t, u - v) dv for smooth terms of one common rate.
Expr convolve(const Expr& a, const Expr& b);

/// integral_0^inf u^j a(t, u) du as a polynomial in t and r.
TPoly total_moment(const Expr& a, unsigned j);

/// integral_0^t a(s, u) ds.
Expr time_antiderivative(const Expr& a);

/// Coefficient multiplying delta(u - r), as a polynomial in (t, r). Only
/// rate-free delta terms are representable.
TPoly dirac_coefficient(const Expr& a);

struct PointValue {
  double smooth = 0.0;
  double dirac_coefficient = 0.0;
};

/// theta(r - u) with the closed-support convention theta(0) = 1.
bool theta_below(const Rational& u, const Rational& r);

/// Evaluates the smooth part at (t, u) and returns the delta coefficient
/// separately. Each rate group is summed exactly, then multiplied by the
/// floating exponential.
PointValue evaluate(const Expr& a, const Rational& t, const Rational& u,
                    const std::optional<Rational>& r = std::nullopt);

/// Evaluates many u points at once, reusing the t and r power tables.
std::vector<PointValue> evaluate_many(const Expr& a, const Rational& t,
                                      std::span<const Rational> us,
                                      const std::optional<Rational>& r = std::nullopt);

}  // namespace pbe
