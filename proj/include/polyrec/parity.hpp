#pragma once

// The 4-state parity chain. States track (parity of A_N, parity of B_N)
// where A_N and B_N count 0s and 1s among N iid uniform draws from
// {0,1,2}. E(e^{i pi (A_N + B_N + A_N B_N)}) = p_ee - p_eo - p_oe - p_oo,
// which tends to -1/2. All arithmetic exact.

#include <polyrec/rational.hpp>

namespace polyrec {

struct ParityDistribution {
  Rational p_ee, p_eo, p_oe, p_oo;

  Rational sum() const { return p_ee + p_eo + p_oe + p_oo; }
  Rational signed_mass() const { return p_ee - p_eo - p_oe - p_oo; }
};

inline ParityDistribution parity_initial() { return {Rational(1), Rational(0), Rational(0), Rational(0)}; }

// One application of the one-third transition matrix with rows
// (1,1,1,0),(1,1,0,1),(1,0,1,1),(0,1,1,1)/3.
inline ParityDistribution step(const ParityDistribution& p) {
  Rational third(1, 3);
  return {third * (p.p_ee + p.p_eo + p.p_oe),
          third * (p.p_ee + p.p_eo + p.p_oo),
          third * (p.p_ee + p.p_oe + p.p_oo),
          third * (p.p_eo + p.p_oe + p.p_oo)};
}

/// E(e^{i pi (A_N + B_N + A_N B_N)}) after N draws, exact.
inline Rational expectation(int n_draws) {
  if (n_draws < 1) throw std::domain_error("parity expectation: N must be >= 1");
  ParityDistribution p = parity_initial();
  for (int i = 0; i < n_draws; ++i) p = step(p);
  return p.signed_mass();
}

/// Same quantity by direct enumeration of all 3^N draw sequences.
inline Rational brute_force_expectation(int n_draws) {
  if (n_draws < 1) throw std::domain_error("parity brute force: N must be >= 1");
  if (n_draws > 12) throw ResourceError("parity brute force: 3^N enumeration capped at N = 12");
  long total = 1;
  for (int i = 0; i < n_draws; ++i) total *= 3;
  long signed_count = 0;
  for (long cfg = 0; cfg < total; ++cfg) {
    long c = cfg;
    long a = 0, b = 0;
    for (int i = 0; i < n_draws; ++i) {
      int digit = static_cast<int>(c % 3);
      c /= 3;
      if (digit == 0) ++a;
      else if (digit == 1) ++b;
    }
    signed_count += ((a + b + a * b) % 2 == 0) ? 1 : -1;
  }
  return make_rational(Integer(signed_count), Integer(total));
}

}  // namespace polyrec
