#include "pbe_djm/term_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pbe_djm/error.hpp"

namespace pbe {

namespace {

int compare_keys(const Term& a, const Term& b) {
  if (a.dist != b.dist) return static_cast<int>(a.dist) < static_cast<int>(b.dist) ? -1 : 1;
  if (int c = cmp(a.exp_rate, b.exp_rate); c != 0) return c < 0 ? -1 : 1;
  if (a.t_pow != b.t_pow) return a.t_pow < b.t_pow ? -1 : 1;
  if (a.u_pow != b.u_pow) return a.u_pow < b.u_pow ? -1 : 1;
  if (a.r_pow != b.r_pow) return a.r_pow < b.r_pow ? -1 : 1;
  return 0;
}

const char* dist_name(DistFactor d) {
  switch (d) {
    case DistFactor::One: return "";
    case DistFactor::DiracAtR: return "delta(u-r)";
    case DistFactor::ThetaBelowR: return "theta(r-u)";
  }
  return "?";
}

// Terms of `a` whose (dist, exp_rate) match form contiguous runs.
template <class Fn>
void for_each_rate_group(const std::vector<Term>& terms, Fn&& fn) {
  std::size_t begin = 0;
  while (begin < terms.size()) {
    std::size_t end = begin + 1;
    while (end < terms.size() && terms[end].dist == terms[begin].dist &&
           terms[end].exp_rate == terms[begin].exp_rate)
      ++end;
    fn(std::span<const Term>(terms.data() + begin, end - begin));
    begin = end;
  }
}

std::vector<Rational> power_table(const Rational& x, unsigned max_pow) {
  std::vector<Rational> p(max_pow + 1);
  p[0] = 1;
  for (unsigned i = 1; i <= max_pow; ++i) p[i] = p[i - 1] * x;
  return p;
}

Integer lcm_of_denominators(std::span<const Rational> values) {
  Integer l = 1;
  for (const auto& v : values) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
  return l;
}

}  // namespace

bool key_less(const Term& a, const Term& b) { return compare_keys(a, b) < 0; }
bool same_key(const Term& a, const Term& b) { return compare_keys(a, b) == 0; }

// ---------------------------------------------------------------------------
// TPoly

TPoly::TPoly(std::initializer_list<std::pair<const Key, Rational>> init) {
  for (const auto& [key, c] : init) add(key.first, key.second, c);
}

void TPoly::add(unsigned t_pow, unsigned r_pow, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = coeffs_.try_emplace(Key{t_pow, r_pow}, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) coeffs_.erase(it);
  }
}

Rational TPoly::coeff(unsigned t_pow, unsigned r_pow) const {
  auto it = coeffs_.find(Key{t_pow, r_pow});
  return it == coeffs_.end() ? Rational(0) : it->second;
}

Rational TPoly::evaluate_exact(const Rational& t, const Rational& r) const {
  unsigned max_t = 0, max_r = 0;
  for (const auto& [key, c] : coeffs_) {
    max_t = std::max(max_t, key.first);
    max_r = std::max(max_r, key.second);
  }
  const auto tp = power_table(t, max_t);
  const auto rp = power_table(r, max_r);
  Rational sum;
  for (const auto& [key, c] : coeffs_) sum += c * tp[key.first] * rp[key.second];
  return sum;
}

double TPoly::evaluate(const Rational& t, const Rational& r) const {
  return to_double(evaluate_exact(t, r));
}

std::string TPoly::to_string() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : coeffs_) {
    os << (first ? "" : " + ") << c.get_str();
    if (key.first) os << "*t^" << key.first;
    if (key.second) os << "*r^" << key.second;
    first = false;
  }
  return os.str();
}

TPoly operator+(const TPoly& a, const TPoly& b) {
  TPoly out = a;
  for (const auto& [key, c] : b.coeffs()) out.add(key.first, key.second, c);
  return out;
}

TPoly operator-(const TPoly& a, const TPoly& b) {
  TPoly out = a;
  for (const auto& [key, c] : b.coeffs()) out.add(key.first, key.second, -c);
  return out;
}

TPoly operator*(const TPoly& a, const TPoly& b) {
  TPoly out;
  for (const auto& [ka, ca] : a.coeffs())
    for (const auto& [kb, cb] : b.coeffs()) out.add(ka.first + kb.first, ka.second + kb.second, ca * cb);
  return out;
}

// ---------------------------------------------------------------------------
// Expr

bool Expr::references_radius() const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [](const Term& t) { return t.r_pow > 0 || t.dist != DistFactor::One; });
}

unsigned Expr::max_t_pow() const {
  unsigned m = 0;
  for (const auto& t : terms_) m = std::max(m, t.t_pow);
  return m;
}

std::string Expr::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    os << (first ? "" : " + ") << t.coeff.get_str();
    if (t.t_pow) os << "*t^" << t.t_pow;
    if (t.u_pow) os << "*u^" << t.u_pow;
    if (t.r_pow) os << "*r^" << t.r_pow;
    if (t.exp_rate != 0) os << "*exp(-" << t.exp_rate.get_str() << "*u)";
    if (t.dist != DistFactor::One) os << "*" << dist_name(t.dist);
    first = false;
  }
  return os.str();
}

Expr normalize(std::vector<Term> raw) {
  for (auto& t : raw) {
    if (t.exp_rate < 0) throw Error(ErrorCode::InvalidArgument, "negative exponential rate");
    if (t.dist == DistFactor::DiracAtR && t.u_pow != 0) {
      t.r_pow += t.u_pow;
      t.u_pow = 0;
    }
  }
  std::sort(raw.begin(), raw.end(), key_less);

  Expr out;
  out.terms_.reserve(raw.size());
  for (auto& t : raw) {
    if (!out.terms_.empty() && same_key(out.terms_.back(), t)) {
      out.terms_.back().coeff += t.coeff;
    } else {
      if (!out.terms_.empty() && out.terms_.back().coeff == 0) out.terms_.pop_back();
      out.terms_.push_back(std::move(t));
    }
  }
  if (!out.terms_.empty() && out.terms_.back().coeff == 0) out.terms_.pop_back();
  return out;
}

Expr monomial(const Rational& coeff, unsigned t_pow, unsigned u_pow, unsigned r_pow,
              const Rational& exp_rate, DistFactor dist) {
  return normalize({Term{coeff, t_pow, u_pow, r_pow, exp_rate, dist}});
}

Expr add(const Expr& a, const Expr& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::vector<Term> raw;
  raw.reserve(a.size() + b.size());
  raw.insert(raw.end(), a.terms().begin(), a.terms().end());
  raw.insert(raw.end(), b.terms().begin(), b.terms().end());
  return normalize(std::move(raw));
}

Expr scale(const Expr& a, const Rational& s) {
  if (s == 0) return {};
  std::vector<Term> raw = a.terms();
  for (auto& t : raw) t.coeff *= s;
  return normalize(std::move(raw));
}

Expr subtract(const Expr& a, const Expr& b) { return add(a, scale(b, Rational(-1))); }

Expr mul_tpoly(const Expr& a, const TPoly& p) {
  std::vector<Term> raw;
  raw.reserve(a.size() * p.size());
  for (const auto& t : a.terms()) {
    for (const auto& [key, c] : p.coeffs()) {
      Term x = t;
      x.coeff *= c;
      x.t_pow += key.first;
      x.r_pow += key.second;
      raw.push_back(std::move(x));
    }
  }
  return normalize(std::move(raw));
}

Expr shift_u_power(const Expr& a, unsigned k) {
  std::vector<Term> raw = a.terms();
  for (auto& t : raw) {
    if (t.dist == DistFactor::DiracAtR)
      t.r_pow += k;
    else
      t.u_pow += k;
  }
  return normalize(std::move(raw));
}

Expr tail_integral(const Expr& a, unsigned w) {
  std::vector<Term> raw;
  for (const auto& t : a.terms()) {
    switch (t.dist) {
      case DistFactor::One: {
        if (t.exp_rate == 0)
          throw Error(ErrorCode::DivergentTail, "polynomial term without exponential decay: " +
                                                    normalize({t}).to_string());
        // int_u^inf v^n e^{-lv} dv = e^{-lu} sum_j n!/j! u^j / l^{n-j+1}
        const unsigned n = t.u_pow + w;
        const Rational inv_rate = 1 / t.exp_rate;
        Rational falling = 1;                         // n!/j!, built from j = n downwards
        Rational rate_pow = inv_rate;                 // 1/l^{n-j+1}
        for (unsigned j = n + 1; j-- > 0;) {
          Term x = t;
          x.u_pow = j;
          x.coeff = t.coeff * falling * rate_pow;
          raw.push_back(std::move(x));
          falling *= j;
          rate_pow *= inv_rate;
        }
        break;
      }
      case DistFactor::DiracAtR: {
        if (t.exp_rate != 0)
          throw Error(ErrorCode::UnsupportedClass, "tail of delta term with exponential factor");
        Term x = t;
        x.r_pow += w;
        x.dist = DistFactor::ThetaBelowR;
        raw.push_back(std::move(x));
        break;
      }
      case DistFactor::ThetaBelowR: {
        if (t.exp_rate != 0)
          throw Error(ErrorCode::UnsupportedClass, "tail of theta term with exponential factor");
        // int_u^r v^n dv = (r^{n+1} - u^{n+1}) / (n+1)
        const unsigned n = t.u_pow + w;
        const Rational c = t.coeff / (n + 1);
        Term hi = t;
        hi.u_pow = 0;
        hi.r_pow += n + 1;
        hi.coeff = c;
        Term lo = t;
        lo.u_pow = n + 1;
        lo.coeff = -c;
        raw.push_back(std::move(hi));
        raw.push_back(std::move(lo));
        break;
      }
    }
  }
  return normalize(std::move(raw));
}

Expr convolve(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return {};
  const Rational& rate = a.terms().front().exp_rate;
  for (const Expr* e : {&a, &b}) {
    for (const auto& t : e->terms()) {
      if (t.dist != DistFactor::One)
        throw Error(ErrorCode::UnsupportedClass, "convolution of a distributional term");
      if (t.exp_rate != rate)
        throw Error(ErrorCode::MixedRates, "convolution operands carry rates " + rate.get_str() +
                                               " and " + t.exp_rate.get_str());
    }
  }

  // With alpha_b = coeff * b!, the u-convolution of u^{b1} and u^{b2} is
  // alpha_{b1} alpha_{b2} u^{b1+b2+1} / (b1+b2+1)!. Scaling both operands to
  // integers turns the pair loop into plain integer multiply-adds.
  struct Scaled {
    std::vector<Integer> num;
    Integer den;
    unsigned max_t = 0, max_u = 0, max_r = 0;
  };
  auto prepare = [](const Expr& e) {
    Scaled s;
    std::vector<Rational> alpha;
    alpha.reserve(e.size());
    for (const auto& t : e.terms()) {
      alpha.push_back(t.coeff * factorial(t.u_pow));
      s.max_t = std::max(s.max_t, t.t_pow);
      s.max_u = std::max(s.max_u, t.u_pow);
      s.max_r = std::max(s.max_r, t.r_pow);
    }
    s.den = lcm_of_denominators(alpha);
    s.num.reserve(alpha.size());
    for (const auto& q : alpha) s.num.push_back(q.get_num() * (s.den / q.get_den()));
    return s;
  };
  const Scaled sa = prepare(a);
  const Scaled sb = prepare(b);

  const std::size_t nt = sa.max_t + sb.max_t + 1;
  const std::size_t nu = sa.max_u + sb.max_u + 1;  // index = b1 + b2; u-power is one more
  const std::size_t nr = sa.max_r + sb.max_r + 1;
  constexpr std::size_t kMaxCells = std::size_t{1} << 27;
  if (nt * nu * nr > kMaxCells)
    throw Error(ErrorCode::TermBlowup, "convolution output box has " + std::to_string(nt * nu * nr) + " cells");

  std::vector<Integer> acc(nt * nu * nr);
  std::vector<bool> touched(acc.size(), false);
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  for (std::size_t i = 0; i < ta.size(); ++i) {
    for (std::size_t j = 0; j < tb.size(); ++j) {
      const std::size_t idx = ((ta[i].t_pow + tb[j].t_pow) * nu + (ta[i].u_pow + tb[j].u_pow)) * nr +
                              (ta[i].r_pow + tb[j].r_pow);
      mpz_addmul(acc[idx].get_mpz_t(), sa.num[i].get_mpz_t(), sb.num[j].get_mpz_t());
      touched[idx] = true;
    }
  }

  const Integer den = sa.den * sb.den;
  std::vector<Term> raw;
  for (std::size_t tp = 0; tp < nt; ++tp) {
    for (std::size_t up = 0; up < nu; ++up) {
      for (std::size_t rp = 0; rp < nr; ++rp) {
        const std::size_t idx = (tp * nu + up) * nr + rp;
        if (!touched[idx] || acc[idx] == 0) continue;
        Rational c(acc[idx], den);
        c.canonicalize();
        c /= factorial(static_cast<unsigned>(up + 1));
        raw.push_back(Term{std::move(c), static_cast<unsigned>(tp), static_cast<unsigned>(up + 1),
                           static_cast<unsigned>(rp), rate, DistFactor::One});
      }
    }
  }
  return normalize(std::move(raw));
}

TPoly total_moment(const Expr& a, unsigned j) {
  TPoly out;
  for (const auto& t : a.terms()) {
    switch (t.dist) {
      case DistFactor::One: {
        if (t.exp_rate == 0)
          throw Error(ErrorCode::DivergentMoment, "moment of a term without exponential decay");
        const unsigned n = t.u_pow + j;
        out.add(t.t_pow, t.r_pow, t.coeff * factorial(n) / pow(t.exp_rate, n + 1));
        break;
      }
      case DistFactor::DiracAtR:
        if (t.exp_rate != 0)
          throw Error(ErrorCode::UnsupportedClass, "moment of delta term with exponential factor");
        out.add(t.t_pow, t.r_pow + j, t.coeff);
        break;
      case DistFactor::ThetaBelowR: {
        if (t.exp_rate != 0)
          throw Error(ErrorCode::UnsupportedClass, "moment of theta term with exponential factor");
        const unsigned n = t.u_pow + j;
        out.add(t.t_pow, t.r_pow + n + 1, t.coeff / (n + 1));
        break;
      }
    }
  }
  return out;
}

Expr time_antiderivative(const Expr& a) {
  std::vector<Term> raw = a.terms();
  for (auto& t : raw) {
    t.t_pow += 1;
    t.coeff /= t.t_pow;
  }
  return normalize(std::move(raw));
}

TPoly dirac_coefficient(const Expr& a) {
  TPoly out;
  for (const auto& t : a.terms()) {
    if (t.dist != DistFactor::DiracAtR) continue;
    if (t.exp_rate != 0)
      throw Error(ErrorCode::UnsupportedClass, "delta coefficient carries exp(-lambda*r)");
    out.add(t.t_pow, t.r_pow, t.coeff);
  }
  return out;
}

bool theta_below(const Rational& u, const Rational& r) { return u <= r; }

std::vector<PointValue> evaluate_many(const Expr& a, const Rational& t, std::span<const Rational> us,
                                      const std::optional<Rational>& r) {
  if (a.references_radius() && !r)
    throw Error(ErrorCode::MissingRadius, "expression references r but no radius was supplied");
  const Rational radius = r.value_or(Rational(0));

  unsigned max_t = 0, max_r = 0;
  for (const auto& term : a.terms()) {
    max_t = std::max(max_t, term.t_pow);
    max_r = std::max(max_r, term.r_pow);
  }
  const auto tp = power_table(t, max_t);
  const auto rp = power_table(radius, max_r);

  // Per rate group, collapse t and r first: coefficient of u^b as an exact number.
  struct Group {
    DistFactor dist;
    double rate;
    std::vector<Rational> by_u_pow;
  };
  std::vector<Group> groups;
  double dirac = 0.0;
  for_each_rate_group(a.terms(), [&](std::span<const Term> run) {
    Group g{run.front().dist, to_double(run.front().exp_rate), {}};
    for (const auto& term : run) {
      if (g.by_u_pow.size() <= term.u_pow) g.by_u_pow.resize(term.u_pow + 1);
      g.by_u_pow[term.u_pow] += term.coeff * tp[term.t_pow] * rp[term.r_pow];
    }
    if (g.dist == DistFactor::DiracAtR) {
      dirac += to_double(g.by_u_pow[0]) * std::exp(-g.rate * to_double(radius));
    } else {
      groups.push_back(std::move(g));
    }
  });

  std::vector<PointValue> out(us.size());
  for (std::size_t k = 0; k < us.size(); ++k) {
    const Rational& u = us[k];
    const double ud = to_double(u);
    double smooth = 0.0;
    for (const auto& g : groups) {
      if (g.dist == DistFactor::ThetaBelowR && !theta_below(u, radius)) continue;
      Rational poly;
      for (std::size_t b = g.by_u_pow.size(); b-- > 0;) {
        poly *= u;
        poly += g.by_u_pow[b];
      }
      smooth += to_double(poly) * std::exp(-g.rate * ud);
    }
    out[k] = PointValue{smooth, dirac};
  }
  return out;
}

PointValue evaluate(const Expr& a, const Rational& t, const Rational& u, const std::optional<Rational>& r) {
  return evaluate_many(a, t, std::span<const Rational>(&u, 1), r).front();
}

}  // namespace pbe
