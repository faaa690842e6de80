#include <doctest.h>

#include "pbe_djm/error.hpp"
#include "pbe_djm/rational.hpp"

using namespace pbe;

TEST_CASE("rationals are stored in lowest terms") {
  const Rational a = make_rational(6, -4);
  CHECK(a.get_num() == -3);
  CHECK(a.get_den() == 2);
  CHECK(make_rational(0, 7) == make_rational(0, 1));
  CHECK(make_rational(0, 7).get_den() == 1);
  CHECK_THROWS_AS(make_rational(1, 0), Error);
}

TEST_CASE("parse_rational reads integers, fractions and decimals exactly") {
  CHECK(parse_rational("3") == 3);
  CHECK(parse_rational("-2/8") == make_rational(-1, 4));
  CHECK(parse_rational("0.4") == make_rational(2, 5));
  CHECK(parse_rational(".5") == make_rational(1, 2));
  CHECK(parse_rational("1e-3") == make_rational(1, 1000));
  CHECK(parse_rational(" 2.5E2 ") == 250);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational(""), Error);
}

TEST_CASE("format_rational prefers finite decimals") {
  CHECK(format_rational(make_rational(2, 5)) == "0.4");
  CHECK(format_rational(make_rational(-1, 100)) == "-0.01");
  CHECK(format_rational(make_rational(7, 1)) == "7");
  CHECK(format_rational(make_rational(1, 3)) == "1/3");
  CHECK(format_rational(make_rational(33, 8)) == "4.125");
  for (const char* s : {"0.01", "12.75", "-3/7", "1600", "0.0625"})
    CHECK(parse_rational(format_rational(parse_rational(s))) == parse_rational(s));
}

TEST_CASE("factorial and pow") {
  CHECK(factorial(0) == 1);
  CHECK(factorial(10) == 3628800);
  CHECK(pow(make_rational(-2, 3), 3) == make_rational(-8, 27));
  CHECK(pow(make_rational(5, 7), 0) == 1);
}
