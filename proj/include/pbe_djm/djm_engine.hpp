#pragma once

// Daftardar-Jafari series for the pure breakage equation
//
//   dc/dt = int_u^inf B(u,v) S(v) c(t,v) dv - S(u) c(t,u),  S(v) = v^k, B(u,v) = 2/v,
//
// optionally coupled with constant-kernel aggregation
//
//   + 1/2 int_0^u c(t,v) c(t,u-v) dv - c(t,u) int_0^inf c(t,v) dv.
//
// Components follow c_0 = c_in and c_{m+1} = int_0^t [L(c_m) + G_m] ds where
// G_m = N(S_m) - N(S_{m-1}) telescopes the quadratic aggregation operator over
// partial sums S_m = c_0 + ... + c_m.

#include <cstddef>
#include <span>
#include <vector>

#include "pbe_djm/term_algebra.hpp"

namespace pbe {

enum class Breakage { BinaryUniform };       // B(u,v) = 2/v
enum class Aggregation { None, ConstantUnit };  // K(u,v) = 0 or 1

struct ProblemSpec {
  unsigned selection_power = 1;
  Breakage breakage = Breakage::BinaryUniform;
  Aggregation aggregation = Aggregation::None;
  Expr initial;
  bool has_radius = false;

  /// k in {1, 2}: the kernels exercised by the reference cases.
  bool validated() const { return selection_power == 1 || selection_power == 2; }

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

/// Checks the class constraints and fills has_radius from the initial data.
ProblemSpec make_problem(unsigned selection_power, Aggregation aggregation, Expr initial);

/// Reference problems 1..6: breakage with S = v, v^2 on exp(-u) and delta(u-r),
/// then constant aggregation plus S = v breakage on exp(-u) and 4u exp(-2u).
ProblemSpec example_problem(int example_id);

/// Number of fragments and their total volume for a parent of volume v under
/// B(u,v) = 2/v: both exact.
Rational fragments_per_breakage();
Rational volume_fraction_per_breakage();

struct SeriesOptions {
  std::size_t term_cap = 2'000'000;
};

struct SeriesSolution {
  ProblemSpec spec;
  std::vector<Expr> components;    // c_0 .. c_n
  std::vector<Expr> partial_sums;  // Phi_0 .. Phi_n

  std::size_t order() const { return components.empty() ? 0 : components.size() - 1; }
  const Expr& phi(std::size_t n) const { return partial_sums.at(n); }
};

/// 2 * tail_integral(c, k-1) - u^k c.
Expr breakage_rhs(const ProblemSpec& spec, const Expr& c);

/// N(c) = 1/2 c*c - c * mu_0(c).
Expr aggregation_operator(const Expr& c);

/// G_m by bilinear expansion from c_m, S_m and S_{m-1} (S_{-1} = 0).
Expr aggregation_increment(const Expr& c_m, const Expr& sum_m, const Expr& sum_prev);

/// G_m for the components c_0..c_m; empty when the spec has no aggregation.
Expr aggregation_G(const ProblemSpec& spec, std::span<const Expr> components);

/// c_{m+1} from a series holding c_0..c_m.
Expr next_component(const ProblemSpec& spec, const SeriesSolution& series);

SeriesSolution compute_series(const ProblemSpec& spec, std::size_t n, const SeriesOptions& options = {});

/// Appends components until the series reaches order n.
void extend_series(SeriesSolution& series, std::size_t n, const SeriesOptions& options = {});

/// General term of reference problems 1..4 in closed form.
Expr closed_form_term(int example_id, unsigned m);

}  // namespace pbe
