#pragma once

#include <optional>

#include "pbe_djm/term_algebra.hpp"

namespace pbe {

/// Reference breakage problems 1..4 with known limits; 3 and 4 need the
/// monodisperse radius r.
struct ExactCase {
  int example_id = 1;
  std::optional<double> radius;
};

/// Throws UnknownExample / InvalidArgument when the case is malformed.
void validate(const ExactCase& c);

/// Smooth part at (t, u) and the delta(u-r) coefficient.
///   1: (1+t)^2 exp(-u(1+t))
///   2: (1+2t+2tu) exp(-u(1+tu))
///   3: exp(-ut)[delta(u-r) + theta(r-u)(2t + t^2(r-u))]
///   4: exp(-u^2 t)[delta(u-r) + 2rt theta(r-u)]
PointValue eval_exact(const ExactCase& c, double t, double u);

/// (1+t^2) exp(-u(1+t)), the limit as printed for problem 1. It does not
/// conserve volume and is kept only to show that the series rejects it.
double example1_printed_limit(double t, double u);

/// mu_j(t) of the exact solution, j in 0..2. Problem 1 is closed form; the
/// others integrate the smooth part numerically (adaptive Gauss-Kronrod,
/// tolerance 1e-12) and add r^j times the delta coefficient.
double exact_moment(const ExactCase& c, unsigned j, double t);

}  // namespace pbe
