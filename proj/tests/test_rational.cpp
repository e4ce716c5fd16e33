#include <polyrec/rational.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace polyrec;

namespace {

// random rational with up-to-128-bit parts, denominator positive
Rational random_rational(std::mt19937_64& rng) {
  Integer num = Integer(rng()) * Integer(rng()) + Integer(rng());
  Integer den = Integer(rng()) + 1;
  if (rng() & 1) num = -num;
  return make_rational(num, den);
}

}  // namespace

TEST_CASE("norm_dist on the stated examples", "[rational]") {
  CHECK(norm_dist(make_rational(11, 4)) == make_rational(1, 4));
  CHECK(norm_dist(make_rational(-1, 2)) == make_rational(1, 2));
  CHECK(norm_dist(Rational(3)) == 0);
}

TEST_CASE("reduce_mod1 on the stated examples", "[rational]") {
  CHECK(reduce_mod1(make_rational(7, 3)).value() == make_rational(1, 3));
  CHECK(reduce_mod1(make_rational(-1, 4)).value() == make_rational(3, 4));
  CHECK(reduce_mod1(Rational(5)).value() == 0);
}

TEST_CASE("norm_dist properties under translation and negation", "[rational]") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 300; ++i) {
    Rational r = random_rational(rng);
    Integer shift = Integer(rng() % 1000) - 500;
    CHECK(norm_dist(r + Rational(shift)) == norm_dist(r));
    CHECK(norm_dist(-r) == norm_dist(r));
    Rational d = norm_dist(r);
    CHECK(d >= 0);
    CHECK(d <= make_rational(1, 2));
    CHECK(d <= abs(r));
  }
}

TEST_CASE("norm_dist triangle inequality", "[rational]") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    Rational r = random_rational(rng);
    Rational s = random_rational(rng);
    CHECK(norm_dist(r + s) <= norm_dist(r) + norm_dist(s));
  }
}

TEST_CASE("reduce_mod1 is idempotent and splits r exactly", "[rational]") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    Rational r = random_rational(rng);
    UnitFraction u = reduce_mod1(r);
    CHECK(reduce_mod1(u.value()).value() == u.value());
    CHECK(u.value() + Rational(floor_of(r)) == r);
    Rational d = norm_dist(r);
    Rational alt = 1 - u.value();
    CHECK(d == (u.value() <= alt ? u.value() : alt));
  }
}

TEST_CASE("divides", "[rational]") {
  CHECK(divides(Integer(32), Integer(96)));
  CHECK_FALSE(divides(Integer(32), Integer(97)));
  // greedy-family instance, recomputed by explicit division
  Integer a(19652), b(2377892);
  Integer q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), b.get_mpz_t(), a.get_mpz_t());
  CHECK(r == 0);
  CHECK(q == 121);
  CHECK(divides(a, b));
  CHECK_THROWS_AS(divides(Integer(0), b), std::domain_error);
}

TEST_CASE("to_float", "[rational]") {
  CHECK(to_float(reduce_mod1(make_rational(1, 3))) == Catch::Approx(1.0 / 3.0).margin(1e-16));
  CHECK(to_float(UnitFraction(Rational(0))) == 0.0);
  CHECK(to_float(reduce_mod1(make_rational(1, 2))) == 0.5);
  // huge operands must go through the quotient, not separate conversions
  Integer num = ipow(Integer(10), 5000) + 1;
  Integer den = 3 * ipow(Integer(10), 5000);
  double v = quotient_to_double(num, den);
  CHECK(v == Catch::Approx(1.0 / 3.0).margin(1e-15));
}

TEST_CASE("to_float is within one ulp of the exact value", "[rational]") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    Rational r = random_rational(rng);
    UnitFraction u = reduce_mod1(r);
    double v = to_float(u);
    // |v - u| <= ulp(v): check via exact rational comparison
    double ulp = std::nextafter(v, 2.0) - v;
    if (ulp == 0.0) ulp = 0x1p-1074;
    Rational diff = Rational(v) - u.value();
    if (diff < 0) diff = -diff;
    CHECK(diff <= Rational(ulp));
  }
}

TEST_CASE("decimal string round trips", "[rational]") {
  Integer big = ipow(Integer(7), 3000);
  CHECK(parse_integer(to_string(big)) == big);
  CHECK(parse_integer("-42") == -42);
  CHECK_THROWS_AS(parse_integer("12a"), std::invalid_argument);
  CHECK_THROWS_AS(parse_integer(""), std::invalid_argument);
  Rational r = make_rational(-6, 4);
  CHECK(to_string(r) == "-3/2");
  CHECK(parse_rational("-3/2") == r);
  CHECK(parse_rational("5") == Rational(5));
  CHECK_THROWS_AS(make_rational(Integer(1), Integer(0)), std::domain_error);
}
