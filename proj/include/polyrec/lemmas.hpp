#pragma once

// Exact verification of the distance-to-nearest-integer estimates that the
// sequence-family conditions guarantee, on a concrete family:
//
//   integrality   m_{tau,s} / (2 b d m_{t,s'} m_{t,s''}^{d-1}) is an integer
//                 (cross-block tau > t, s' <= s''; in-block s' <= s'' < s)
//   offdiagonal   || (sum_j xi_j m_{t,s_j})^c / (2 b d m_{t,s} m_{t,s'}^{d-1})
//                    - xi_s xi_{s'}^{d-1} / 2b ||  <  1 / (t^4 2^{t+1})
//                 when |F| > 1, s and s' in F, c = d; plain bound otherwise
//   diagonal      same with denominator 2 b m_{t,s}^d, centered at
//                 xi_s^d / 2b when c = d and s in F
//   tail          termwise bounds behind the closed-form tail estimate
//
// Everything is exact integer arithmetic: a distance ||num/D|| compares as
// min(rem, D - rem) * bound_den < D with rem = num mod D. No floats.

#include <polyrec/family.hpp>
#include <polyrec/parallel.hpp>
#include <polyrec/rational.hpp>

#include <json.hpp>

#include <algorithm>
#include <random>
#include <unordered_set>

namespace polyrec {

struct LemmaBudget {
  long exhaustive_cap = 4096;  // max (F, xi) pairs for exhaustive enumeration
  long samples = 100;          // sampled pairs above the cap (extremes always added)
  std::uint64_t seed = kDefaultSeed;
};

struct LemmaViolation {
  std::string where;   // human-readable instance id
  std::string value;   // observed distance, "num/den"
  std::string bound;   // bound it should be under
};

struct LemmaReport {
  std::string lemma;
  int t = 0;
  long instances = 0;
  std::vector<LemmaViolation> violations;
  Rational max_dist;   // largest observed distance ||.||
  Rational max_slack;  // largest observed ||.|| / bound

  bool pass() const { return violations.empty(); }

  nlohmann::json to_json() const {
    nlohmann::json v = nlohmann::json::array();
    for (const auto& x : violations)
      v.push_back({{"where", x.where}, {"value", x.value}, {"bound", x.bound}});
    return {{"lemma", lemma},       {"t", t},
            {"instances", instances}, {"violations", std::move(v)},
            {"max_dist", to_string(max_dist)}, {"max_slack", to_string(max_slack)},
            {"pass", pass()}};
  }
};

namespace detail {

// (F, xi) as bitmasks over block positions; sign bit set means xi = -1.
struct SignPattern {
  std::uint32_t mask = 0;
  std::uint32_t signs = 0;  // subset of mask

  std::string label(int width) const {
    std::string out;
    for (int s = 1; s <= width; ++s) {
      if (!(mask & (1u << (s - 1)))) continue;
      if (!out.empty()) out += ',';
      out += (signs & (1u << (s - 1))) ? '-' : '+';
      out += std::to_string(s);
    }
    return out;
  }
};

// Deterministic pattern list: exhaustive when 3^width - 1 fits the cap,
// otherwise forced extremes (full block all-plus / all-minus, both signs
// of every singleton) followed by seeded distinct uniform samples.
inline std::vector<SignPattern> make_patterns(int width, const LemmaBudget& budget) {
  double total = std::pow(3.0, width) - 1;
  std::vector<SignPattern> out;
  if (total <= static_cast<double>(budget.exhaustive_cap)) {
    for (std::uint32_t mask = 1; mask < (1u << width); ++mask) {
      std::vector<int> pos;
      for (int j = 0; j < width; ++j)
        if (mask & (1u << j)) pos.push_back(j);
      for (std::uint32_t packed = 0; packed < (1u << pos.size()); ++packed) {
        std::uint32_t signs = 0;
        for (std::size_t i = 0; i < pos.size(); ++i)
          if (packed & (1u << i)) signs |= 1u << pos[i];
        out.push_back({mask, signs});
      }
    }
    return out;
  }

  std::unordered_set<std::uint64_t> seen;
  auto push_unique = [&](SignPattern p) {
    std::uint64_t key = (static_cast<std::uint64_t>(p.mask) << 32) | p.signs;
    if (seen.insert(key).second) out.push_back(p);
  };
  const std::uint32_t full = (1u << width) - 1;
  push_unique({full, 0});
  push_unique({full, full});
  for (int s = 0; s < width; ++s) {
    push_unique({1u << s, 0});
    push_unique({1u << s, 1u << s});
  }
  std::mt19937_64 rng(budget.seed);
  long wanted = budget.samples;
  while (wanted > 0) {
    std::uint32_t mask = 0, signs = 0;
    for (int s = 0; s < width; ++s) {
      switch (rng() % 3) {
        case 0: break;
        case 1: mask |= 1u << s; break;
        case 2: mask |= 1u << s; signs |= 1u << s; break;
      }
    }
    if (mask == 0) continue;
    std::uint64_t key = (static_cast<std::uint64_t>(mask) << 32) | signs;
    if (!seen.insert(key).second) continue;
    out.push_back({mask, signs});
    --wanted;
  }
  return out;
}

inline Integer signed_block_sum(const SequenceFamily& f, int t, const SignPattern& p) {
  Integer n = 0;
  for (int s = 1; s <= t * t; ++s) {
    if (!(p.mask & (1u << (s - 1)))) continue;
    if (p.signs & (1u << (s - 1))) n -= f.m(t, s);
    else n += f.m(t, s);
  }
  return n;
}

// Tracks the max of nonnegative fractions num/den without canonicalizing.
// Comparisons go through correctly rounded doubles first; the exact
// cross-multiplication only runs when the doubles are too close to call.
struct MaxFraction {
  Integer num{0}, den{1};
  bool set = false;

  void update(const Integer& n, const Integer& d) {
    if (n == 0) return;
    if (!set) {
      num = n;
      den = d;
      set = true;
      return;
    }
    double a = quotient_to_double(n, d);
    double b = quotient_to_double(num, den);
    if (a < b * (1.0 - 1e-9)) return;
    if (a > b * (1.0 + 1e-9) || b == 0.0) {
      num = n;
      den = d;
      return;
    }
    if (n * den > num * d) {
      num = n;
      den = d;
    }
  }

  Rational value() const { return set ? make_rational(num, den) : Rational(0); }
};

struct InstanceStats {
  long instances = 0;
  std::vector<LemmaViolation> violations;
  MaxFraction max_dist;

  void merge(InstanceStats&& o) {
    instances += o.instances;
    for (auto& v : o.violations) violations.push_back(std::move(v));
    max_dist.update(o.max_dist.num, o.max_dist.den);
  }
};

// distance check ||num/D|| < 1/bound_den, recording stats and violations
inline void check_distance(InstanceStats& st, const Integer& num, const Integer& D,
                           const Integer& bound_den, const std::string& where) {
  ++st.instances;
  Integer rem;
  mpz_fdiv_r(rem.get_mpz_t(), num.get_mpz_t(), D.get_mpz_t());
  Integer other = D - rem;
  const Integer& dist = rem <= other ? rem : other;
  st.max_dist.update(dist, D);
  if (!(dist * bound_den < D))
    st.violations.push_back({where, to_string(make_rational(dist, D)),
                             "1/" + bound_den.get_str()});
  }

}  // namespace detail

/// Cross-block and in-block integrality, exhaustive over all index tuples.
inline LemmaReport verify_integrality(const SequenceFamily& f) {
  LemmaReport rep;
  rep.lemma = "integrality";
  rep.t = f.t_max;
  const unsigned long ud = static_cast<unsigned long>(f.d);

  auto check = [&](const Integer& m_num, const Integer& den, const std::string& where) {
    ++rep.instances;
    if (!divides(den, m_num))
      rep.violations.push_back({where, to_string(make_rational(m_num % den, den)), "integer"});
  };

  for (int t = 1; t <= f.t_max; ++t)
    for (int s1 = 1; s1 <= t * t; ++s1)
      for (int s2 = s1; s2 <= t * t; ++s2) {
        Integer den = 2 * f.b * f.d * f.m(t, s1) * ipow(f.m(t, s2), ud - 1);
        // cross-block: every entry of every later block
        for (int tau = t + 1; tau <= f.t_max; ++tau)
          for (int s = 1; s <= tau * tau; ++s)
            check(f.m(tau, s), den,
                  "cross tau=" + std::to_string(tau) + " s=" + std::to_string(s) + " t=" +
                      std::to_string(t) + " s'=" + std::to_string(s1) + " s''=" + std::to_string(s2));
        // in-block: entries after s2 within the same block
        for (int s = s2 + 1; s <= t * t; ++s)
          check(f.m(t, s), den,
                "in t=" + std::to_string(t) + " s=" + std::to_string(s) + " s'=" +
                    std::to_string(s1) + " s''=" + std::to_string(s2));
      }
  rep.max_dist = Rational(0);
  rep.max_slack = Rational(0);
  return rep;
}

/// Off-diagonal estimate over (c, s<s', F, xi); exhaustive or sampled per budget.
inline LemmaReport verify_offdiagonal(const SequenceFamily& f, int t,
                                      const LemmaBudget& budget = {}) {
  if (t < 2 || t > f.t_max)
    throw std::domain_error("verify_offdiagonal: requires 2 <= t <= t_max");
  const int width = t * t;
  const unsigned long ud = static_cast<unsigned long>(f.d);
  const Integer bound_den = ipow(Integer(t), 4) * pow2(static_cast<unsigned long>(t + 1));

  // denominators and their (2b)-quotients, cached per (s, s')
  std::vector<std::vector<Integer>> den(width + 1), shift(width + 1);
  for (int s = 1; s < width; ++s) {
    den[s].resize(width + 1);
    shift[s].resize(width + 1);
    for (int s2 = s + 1; s2 <= width; ++s2) {
      shift[s][s2] = f.d * f.m(t, s) * ipow(f.m(t, s2), ud - 1);
      den[s][s2] = 2 * f.b * shift[s][s2];
    }
  }

  auto patterns = detail::make_patterns(width, budget);
  auto stats = parallel_map<detail::InstanceStats>(patterns.size(), [&](std::size_t i) {
    const auto& p = patterns[i];
    detail::InstanceStats st;
    Integer n = detail::signed_block_sum(f, t, p);
    std::vector<Integer> pw(ud + 1);
    pw[1] = n;
    for (unsigned long c = 2; c <= ud; ++c) pw[c] = pw[c - 1] * n;
    const int members = __builtin_popcount(p.mask);
    for (int c = 1; c <= f.d; ++c)
      for (int s = 1; s < width; ++s)
        for (int s2 = s + 1; s2 <= width; ++s2) {
          bool centered = c == f.d && members > 1 && (p.mask & (1u << (s - 1))) &&
                          (p.mask & (1u << (s2 - 1)));
          std::string where = "c=" + std::to_string(c) + " s=" + std::to_string(s) +
                              " s'=" + std::to_string(s2) + " F=" + p.label(width);
          if (centered) {
            int xs = (p.signs & (1u << (s - 1))) ? -1 : 1;
            int xs2 = (p.signs & (1u << (s2 - 1))) ? -1 : 1;
            int x = xs * (f.d % 2 == 0 ? xs2 : 1);  // xi_s xi_{s'}^{d-1}
            Integer num = pw[static_cast<unsigned long>(c)];
            if (x > 0) num -= shift[s][s2];
            else num += shift[s][s2];
            detail::check_distance(st, num, den[s][s2], bound_den, where + " centered");
          } else {
            detail::check_distance(st, pw[static_cast<unsigned long>(c)], den[s][s2], bound_den,
                                   where);
          }
        }
    return st;
  });

  detail::InstanceStats total;
  for (auto& st : stats) total.merge(std::move(st));

  LemmaReport rep;
  rep.lemma = "offdiagonal";
  rep.t = t;
  rep.instances = total.instances;
  rep.violations = std::move(total.violations);
  rep.max_dist = total.max_dist.value();
  rep.max_slack = rep.max_dist * Rational(bound_den);
  return rep;
}

/// Diagonal estimate over (c, s, F, xi); same enumeration contract.
inline LemmaReport verify_diagonal(const SequenceFamily& f, int t, const LemmaBudget& budget = {}) {
  if (t < 1 || t > f.t_max) throw std::domain_error("verify_diagonal: t out of range");
  const int width = t * t;
  const unsigned long ud = static_cast<unsigned long>(f.d);
  const Integer bound_den = ipow(Integer(t), 4) * pow2(static_cast<unsigned long>(t + 1));

  std::vector<Integer> mpow(width + 1), den(width + 1);
  for (int s = 1; s <= width; ++s) {
    mpow[s] = ipow(f.m(t, s), ud);
    den[s] = 2 * f.b * mpow[s];
  }

  auto patterns = detail::make_patterns(width, budget);
  auto stats = parallel_map<detail::InstanceStats>(patterns.size(), [&](std::size_t i) {
    const auto& p = patterns[i];
    detail::InstanceStats st;
    Integer n = detail::signed_block_sum(f, t, p);
    std::vector<Integer> pw(ud + 1);
    pw[1] = n;
    for (unsigned long c = 2; c <= ud; ++c) pw[c] = pw[c - 1] * n;
    for (int c = 1; c <= f.d; ++c)
      for (int s = 1; s <= width; ++s) {
        bool centered = c == f.d && (p.mask & (1u << (s - 1)));
        std::string where =
            "c=" + std::to_string(c) + " s=" + std::to_string(s) + " F=" + p.label(width);
        if (centered) {
          int xs = (p.signs & (1u << (s - 1))) ? -1 : 1;
          int x = f.d % 2 == 1 ? xs : 1;  // xi_s^d
          Integer num = pw[static_cast<unsigned long>(c)];
          if (x > 0) num -= mpow[s];
          else num += mpow[s];
          detail::check_distance(st, num, den[s], bound_den, where + " centered");
        } else {
          detail::check_distance(st, pw[static_cast<unsigned long>(c)], den[s], bound_den, where);
        }
      }
    return st;
  });

  detail::InstanceStats total;
  for (auto& st : stats) total.merge(std::move(st));

  LemmaReport rep;
  rep.lemma = "diagonal";
  rep.t = t;
  rep.instances = total.instances;
  rep.violations = std::move(total.violations);
  rep.max_dist = total.max_dist.value();
  rep.max_slack = rep.max_dist * Rational(bound_den);
  return rep;
}

namespace detail {

// Block coefficient mass sum_s 1/(2 m_{t,s}^d) + sum_{s<s'} 1/(2 d m_{t,s}
// m_{t,s'}^{d-1}) as an uncanonicalized fraction over 4 d m_{t,t^2}^d,
// which every term's denominator divides.
inline std::pair<Integer, Integer> block_mass_raw(const SequenceFamily& f, int t) {
  const int width = t * t;
  const unsigned long ud = static_cast<unsigned long>(f.d);
  Integer common = 4 * f.d * ipow(f.m(t, width), ud);
  Integer num = 0;
  for (int s = 1; s <= width; ++s) {
    Integer term_den = 2 * ipow(f.m(t, s), ud);
    Integer q;
    mpz_divexact(q.get_mpz_t(), common.get_mpz_t(), term_den.get_mpz_t());
    num += q;
  }
  for (int s = 1; s < width; ++s)
    for (int s2 = s + 1; s2 <= width; ++s2) {
      Integer term_den = 2 * f.d * f.m(t, s) * ipow(f.m(t, s2), ud - 1);
      Integer q;
      mpz_divexact(q.get_mpz_t(), common.get_mpz_t(), term_den.get_mpz_t());
      num += q;
    }
  return {std::move(num), std::move(common)};
}

}  // namespace detail

/// Termwise checks behind the tail estimate, for the blocks realized in f.
inline LemmaReport verify_tail(const SequenceFamily& f, int tau) {
  if (tau < 1 || tau >= f.t_max + 1) throw std::out_of_range("verify_tail: tau out of range");
  LemmaReport rep;
  rep.lemma = "tail";
  rep.t = tau;
  rep.max_dist = Rational(0);
  rep.max_slack = Rational(0);

  const unsigned long ud = static_cast<unsigned long>(f.d);
  Integer mtau_pow = ipow(f.m(tau, tau * tau), ud);

  Integer sum_num = 0, sum_den = 1;
  for (int t = tau + 1; t <= f.t_max; ++t) {
    auto [mass_num, mass_den] = detail::block_mass_raw(f, t);
    Integer t4 = ipow(Integer(t), 4);

    ++rep.instances;  // mass_t < t^4 / m_{t,1}
    if (!(mass_num * f.m(t, 1) < t4 * mass_den))
      rep.violations.push_back({"mass t=" + std::to_string(t), to_string(make_rational(mass_num, mass_den)),
                                to_string(make_rational(t4, f.m(t, 1)))});

    ++rep.instances;  // t^4 / m_{t,1} < t^4 / (t^{2d+4} 2^t m_{tau,tau^2}^d)
    Integer rhs = ipow(Integer(t), 2 * ud + 4) * pow2(static_cast<unsigned long>(t)) * mtau_pow;
    if (!(f.m(t, 1) > rhs))
      rep.violations.push_back({"growth t=" + std::to_string(t), f.m(t, 1).get_str(),
                                "> " + rhs.get_str()});

    // accumulate the partial sum without canonicalizing
    sum_num = sum_num * mass_den + mass_num * sum_den;
    sum_den = sum_den * mass_den;
  }

  if (f.t_max > tau) {
    ++rep.instances;  // partial sum < closed-form tail bound
    Rational tb = tail_bound(f, tau);
    if (!(sum_num * tb.get_den() < tb.get_num() * sum_den))
      rep.violations.push_back({"partial sum", to_string(make_rational(sum_num, sum_den)),
                                to_string(tb)});
  }
  return rep;
}

}  // namespace polyrec
