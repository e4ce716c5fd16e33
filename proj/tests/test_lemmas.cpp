#include <polyrec/lemmas.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "test_fixtures.hpp"

using namespace polyrec;

TEST_CASE("integrality holds exhaustively and matches the worked instance", "[lemmas]") {
  const SequenceFamily& f = family122();
  LemmaReport rep = verify_integrality(f);
  CHECK(rep.pass());
  CHECK(rep.instances > 0);

  // cross-block instance recomputed directly: m_{2,1} over 2bd m_{1,1} m_{1,1}^{d-1}
  Integer den = 2 * 1 * 2 * f.m(1, 1) * f.m(1, 1);
  CHECK(den == 1156);
  CHECK(f.m(2, 1) % den == 0);
  CHECK(f.m(2, 1) / den == 2057);
  CHECK(Integer(1156) * 2057 == 2377892);

  // in-block: m_{2,2} over 2bd m_{2,1}^2
  CHECK(f.m(2, 2) % (4 * f.m(2, 1) * f.m(2, 1)) == 0);
}

TEST_CASE("integrality catches a corrupted family", "[lemmas]") {
  SequenceFamily f = family122();
  f.blocks[1][1] += 1;  // m_{2,2}
  LemmaReport rep = verify_integrality(f);
  CHECK_FALSE(rep.pass());
  CHECK(rep.violations.size() >= 1);
}

TEST_CASE("off-diagonal estimate, exhaustive at t=2", "[lemmas]") {
  const SequenceFamily& f = family122();
  LemmaReport rep = verify_offdiagonal(f, 2);
  CHECK(rep.pass());
  // 80 (F,xi) pairs x 2 exponents x 6 index pairs
  CHECK(rep.instances == 80 * 2 * 6);
  CHECK(rep.max_dist < make_rational(1, 128));
  CHECK(rep.max_dist > 0);
  CHECK(rep.max_slack == rep.max_dist * 128);
  CHECK_THROWS_AS(verify_offdiagonal(f, 1), std::domain_error);
}

TEST_CASE("off-diagonal case split: centered vs raw value", "[lemmas]") {
  const SequenceFamily& f = family122();
  const int t = 2;
  Rational bound = make_rational(1, 128);
  // F = {s, s'}, both signs +1, c = d: the centered distance is small, so
  // the uncentered value must sit within the bound of 1/(2b) = 1/2.
  for (int s = 1; s <= 3; ++s)
    for (int s2 = s + 1; s2 <= 4; ++s2) {
      Integer n = f.m(t, s) + f.m(t, s2);
      Integer den = 2 * 1 * 2 * f.m(t, s) * f.m(t, s2);
      Rational value = make_rational(n * n, den);
      Rational centered = norm_dist(value - make_rational(1, 2));
      CHECK(centered < bound);
      CHECK(norm_dist(value) >= make_rational(1, 2) - bound);
    }
}

TEST_CASE("diagonal estimate, exhaustive at t=2, plus stated instances", "[lemmas]") {
  const SequenceFamily& f = family122();
  LemmaReport rep = verify_diagonal(f, 2);
  CHECK(rep.pass());
  CHECK(rep.instances == 80 * 2 * 4);
  CHECK(rep.max_dist < make_rational(1, 128));
}

TEST_CASE("diagonal singleton instances", "[lemmas]") {
  const SequenceFamily& f = family122();
  for (int s = 1; s <= 4; ++s) {
    const Integer& m = f.m(2, s);
    // c = d, F = {s}: value m^d/(2b m^d) = 1/2 exactly
    Rational centered = norm_dist(make_rational(m * m, 2 * m * m) - make_rational(1, 2));
    CHECK(centered == 0);
    // c < d, F = {s}: ||m^c/(2b m^d)|| = m^{c-d}/(2b) under the bound
    Rational v = norm_dist(make_rational(m, 2 * m * m));
    CHECK(v == make_rational(1, 2 * m));
    CHECK(v < make_rational(1, 128));
  }
}

TEST_CASE("diagonal works at t=1", "[lemmas]") {
  const SequenceFamily& f = family122();
  LemmaReport rep = verify_diagonal(f, 1);
  CHECK(rep.pass());
  CHECK(rep.instances == 2 * 2 * 1);  // two patterns, two exponents, one index
}

TEST_CASE("sampled runs are deterministic", "[lemmas]") {
  const SequenceFamily& f = family122();
  LemmaBudget tight;
  tight.exhaustive_cap = 10;  // force sampling at t=2
  tight.samples = 5;
  tight.seed = 42;
  LemmaReport a = verify_offdiagonal(f, 2, tight);
  LemmaReport b = verify_offdiagonal(f, 2, tight);
  CHECK(a.instances == b.instances);
  CHECK(a.max_dist == b.max_dist);
  CHECK(a.max_slack == b.max_slack);
  CHECK(a.violations.size() == b.violations.size());
  // extremes (2 + 2*4 = 10) plus 5 samples, 12 checks per pattern
  CHECK(a.instances == 15 * 12);

  LemmaBudget other = tight;
  other.seed = 43;
  LemmaReport c = verify_offdiagonal(f, 2, other);
  CHECK(c.pass());
}

TEST_CASE("tail lemma termwise checks", "[lemmas]") {
  const SequenceFamily& f = family123();
  LemmaReport tau2 = verify_tail(f, 2);
  CHECK(tau2.pass());
  CHECK(tau2.instances == 3);  // two termwise checks for block 3 + partial sum
  LemmaReport tau1 = verify_tail(f, 1);
  CHECK(tau1.pass());
  CHECK(tau1.instances == 5);
  LemmaReport vac = verify_tail(f, 3);
  CHECK(vac.pass());
  CHECK(vac.instances == 0);
}

TEST_CASE("report JSON shape", "[lemmas]") {
  LemmaReport rep = verify_diagonal(family122(), 2);
  nlohmann::json j = rep.to_json();
  CHECK(j["lemma"] == "diagonal");
  CHECK(j["t"] == 2);
  CHECK(j["pass"] == true);
  CHECK(j["violations"].is_array());
  CHECK(j["max_slack"].is_string());
}
