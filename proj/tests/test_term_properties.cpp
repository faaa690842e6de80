#include <doctest.h>

#include "property_suite.hpp"

using namespace pbe;
using namespace pbe::test;

TEST_CASE("randomized algebra invariants") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const PropertyTally tally = run_term_properties(seed, 700);
    INFO("seed " << seed);
    std::string failures;
    for (const auto& f : tally.failures) failures += f + "\n";
    INFO(failures);
    CHECK(tally.ok());
    CHECK(tally.cases == 700);
  }
}

TEST_CASE("trapezoid moments agree with total_moment") {
  CHECK(quadrature_consistency(11, 40) < 1e-8);
}

TEST_CASE("generator stays inside the closure class") {
  TermGenerator gen(5);
  for (int i = 0; i < 200; ++i) {
    const Expr e = gen.transformable();
    for (const auto& t : e.terms()) {
      CHECK(t.coeff != 0);
      if (t.dist != DistFactor::One) CHECK(t.exp_rate == 0);
      if (t.dist == DistFactor::DiracAtR) CHECK(t.u_pow == 0);
    }
  }
}
