#pragma once

// Exact integer / rational substrate. Integers and rationals are GMP
// values (subquadratic multiplication, division and gcd; operands in this
// project reach multi-million digits). Rationals are always canonical:
// reduced, denominator > 0. The only exact->approximate boundary is
// to_float(), which rounds to nearest and costs at most 1 ulp.
//
// All values are immutable after construction and all operations are
// pure, so everything here is safe to share across threads.

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace polyrec {

using Integer = mpz_class;
using Rational = mpq_class;

inline constexpr std::uint64_t kDefaultSeed = 0x706f6c7972656331ull;

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// num/den reduced to canonical form; den must be nonzero.
inline Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw std::domain_error("make_rational: zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Integer floor_of(const Rational& r) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), mpq_numref(r.get_mpq_t()), mpq_denref(r.get_mpq_t()));
  return q;
}

// Residue of r mod 1, canonical representative in [0, 1).
class UnitFraction {
 public:
  UnitFraction() : v_(0) {}
  explicit UnitFraction(Rational v) : v_(std::move(v)) {
    if (v_ < 0 || v_ >= 1) throw std::domain_error("UnitFraction: value outside [0,1)");
  }
  const Rational& value() const { return v_; }

  friend bool operator==(const UnitFraction& a, const UnitFraction& b) { return a.v_ == b.v_; }

 private:
  Rational v_;
};

/// r - floor(r), exact.
inline UnitFraction reduce_mod1(const Rational& r) {
  Rational u = r - Rational(floor_of(r));
  return UnitFraction(std::move(u));
}

/// Distance from r to the nearest integer, exact; result in [0, 1/2].
inline Rational norm_dist(const Rational& r) {
  Rational u = reduce_mod1(r).value();
  Rational w = 1 - u;
  return u <= w ? u : w;
}

/// True iff a | b. a must be nonzero.
inline bool divides(const Integer& a, const Integer& b) {
  if (a == 0) throw std::domain_error("divides: zero divisor");
  return mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t()) != 0;
}

// Round-to-nearest double of num/den via one correctly rounded division
// of the full-precision operands. Never converts num and den separately
// (they overflow double range long before the quotient does).
inline double quotient_to_double(const Integer& num, const Integer& den) {
  if (num == 0) return 0.0;
  mpq_class q;
  mpz_set(mpq_numref(q.get_mpq_t()), num.get_mpz_t());
  mpz_set(mpq_denref(q.get_mpq_t()), den.get_mpz_t());
  mpfr_t x;
  mpfr_init2(x, 53);
  mpfr_set_q(x, q.get_mpq_t(), MPFR_RNDN);
  double d = mpfr_get_d(x, MPFR_RNDN);
  mpfr_clear(x);
  return d;
}

inline double to_float(const Rational& r) {
  return quotient_to_double(r.get_num(), r.get_den());
}

inline double to_float(const UnitFraction& u) { return to_float(u.value()); }

// -- decimal-string interchange ---------------------------------------------

inline std::string to_string(const Integer& n) { return n.get_str(); }

inline std::string to_string(const Rational& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Integer parse_integer(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("parse_integer: empty string");
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (start == s.size()) throw std::invalid_argument("parse_integer: no digits");
  for (std::size_t i = start; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9')
      throw std::invalid_argument("parse_integer: bad digit in \"" + s.substr(0, 32) + "\"");
  Integer n;
  mpz_set_str(n.get_mpz_t(), s.c_str(), 10);
  return n;
}

// "num/den" or plain "num".
inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(parse_integer(s));
  Integer num = parse_integer(s.substr(0, slash));
  Integer den = parse_integer(s.substr(slash + 1));
  return make_rational(num, den);
}

inline Integer pow2(unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

inline Integer ipow(const Integer& base, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

}  // namespace polyrec
