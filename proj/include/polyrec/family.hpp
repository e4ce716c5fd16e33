#pragma once

// Sequence families ((m_{t,s})_{s=1..t^2})_{t<=t_max} with parameters b
// and d > 1, satisfying the five growth/divisibility conditions
//
//   C.1  m_{t,1} > t^{2d+4} 2^{t+1} 2^d
//   C.2  (2 b d m_{t,s}^{d+1}) | m_{t,s+1}
//   C.3  (2 b d m_{t,t^2}^{d+1}) | m_{t+1,1}
//   C.4  m_{t,s}^d / m_{t,s'} < 1 / (t^{2d+4} 2^{t+1} 2^d)   for s < s'
//   C.5  m_{tau,s}^d / m_{t,s'} < 1 / (t^{2d+4} 2^{t+1} 2^d) for tau < t
//
// plus the derived generator sequences n_{t,s} (sums of t consecutive
// block entries) and signed finite sums over them. construct_family
// builds the greedy-minimal family; validate_family checks every
// instance of C.1-C.5 exactly and is the source of truth.

#include <polyrec/polynomial.hpp>
#include <polyrec/rational.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace polyrec {

inline constexpr long kDefaultDigitBudget = 50'000'000;
inline constexpr const char* kToolVersion = "polyrec 0.1.0";

struct FamilyFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SequenceFamily {
  Integer b;
  int d = 0;
  int t_max = 0;
  std::vector<std::vector<Integer>> blocks;  // blocks[t-1] holds m_{t,1..t^2}

  const Integer& m(int t, int s) const {
    if (t < 1 || t > t_max) throw std::out_of_range("SequenceFamily: block index out of range");
    const auto& blk = blocks[static_cast<std::size_t>(t) - 1];
    if (s < 1 || static_cast<std::size_t>(s) > blk.size())
      throw std::out_of_range("SequenceFamily: in-block index out of range");
    return blk[static_cast<std::size_t>(s) - 1];
  }

  friend bool operator==(const SequenceFamily& a, const SequenceFamily& b_) {
    return a.b == b_.b && a.d == b_.d && a.t_max == b_.t_max && a.blocks == b_.blocks;
  }
};

/// sigma(t) = sum of r^2 for r < t; block t occupies flat indices sigma(t)+1 .. sigma(t)+t^2.
inline long sigma(long t) {
  if (t < 1) throw std::domain_error("sigma: t must be >= 1");
  return (t - 1) * t * (2 * t - 1) / 6;
}

// t^{2d+4} 2^{t+1} 2^d, the C.1/C.4/C.5 threshold for block t.
inline Integer block_threshold(int t, int d) {
  Integer r = ipow(Integer(t), static_cast<unsigned long>(2 * d + 4));
  return r * pow2(static_cast<unsigned long>(t + 1 + d));
}

// ---------------------------------------------------------------------------
// construction

struct ConstructOptions {
  long digit_budget = kDefaultDigitBudget;
};

// Projected decimal digits of the final greedy term. Digits multiply by
// roughly (d+1) per flat step, so this is cheap to estimate up front.
inline long project_final_digits(const Integer& b, int d, int t_max) {
  double log_m = std::log10(4.0 * (1 << d) + 1.0);  // first term, t = 1 threshold
  double log_factor = mpz_sizeinbase(b.get_mpz_t(), 10) + std::log10(2.0 * d) + 1.0;
  long flat_count = sigma(t_max + 1);
  constexpr double kCap = 1e18;  // far beyond any realistic digit budget
  for (long k = 1; k < flat_count; ++k) {
    double log_step = (d + 1) * log_m + log_factor;
    double log_bound = (2 * d + 4) * std::log10(static_cast<double>(k + 1)) +
                       (k + 2 + d) * std::log10(2.0) + d * log_m + log_factor;
    log_m = std::max(log_step, log_bound);
    if (!(log_m < kCap)) return std::numeric_limits<long>::max();
  }
  return static_cast<long>(log_m) + 1;
}

/// Greedy-minimal family: each flat term is the smallest positive multiple
/// of 2 b d m^{d+1} of its predecessor that clears the growth thresholds.
inline SequenceFamily construct_family(const Integer& b, int d, int t_max,
                                       const ConstructOptions& opts = {}) {
  if (b < 1) throw std::domain_error("construct_family: b must be >= 1");
  if (d < 2) throw std::domain_error("construct_family: d must be >= 2");
  if (t_max < 1) throw std::domain_error("construct_family: t_max must be >= 1");

  long projected = project_final_digits(b, d, t_max);
  if (projected > opts.digit_budget)
    throw ResourceError("construct_family: projected final term of ~" + std::to_string(projected) +
                        " digits exceeds budget of " + std::to_string(opts.digit_budget));

  SequenceFamily fam;
  fam.b = b;
  fam.d = d;
  fam.t_max = t_max;

  Integer prev;
  long flat = 0;
  for (int t = 1; t <= t_max; ++t) {
    std::vector<Integer> block;
    for (int s = 1; s <= t * t; ++s) {
      ++flat;
      Integer term;
      if (flat == 1) {
        term = block_threshold(1, d) + 1;
      } else {
        Integer step = 2 * b * d * ipow(prev, static_cast<unsigned long>(d + 1));
        // growth constraint (a): term > (k)^{2d+4} 2^{k+1} 2^d prev^d at flat index k
        Integer bound = ipow(Integer(flat), static_cast<unsigned long>(2 * d + 4)) *
                        pow2(static_cast<unsigned long>(flat + 1 + d)) *
                        ipow(prev, static_cast<unsigned long>(d));
        // constraint (b): block-opening terms clear the C.1 threshold
        if (s == 1) {
          Integer open = block_threshold(t, d);
          if (open > bound) bound = open;
        }
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), bound.get_mpz_t(), step.get_mpz_t());
        term = (q + 1) * step;
      }
      prev = term;
      block.push_back(std::move(term));
    }
    fam.blocks.push_back(std::move(block));
  }
  return fam;
}

// ---------------------------------------------------------------------------
// validation

struct ConditionCheck {
  std::string condition;  // "C.1".."C.5", or structural
  long instances = 0;
  bool pass = true;
  std::string first_violation;  // empty when pass
};

struct ConditionReport {
  std::vector<ConditionCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
      arr.push_back({{"condition", c.condition},
                     {"instances", c.instances},
                     {"pass", c.pass},
                     {"first_violation", c.first_violation}});
    return {{"conditions", arr}, {"all_pass", all_pass()}};
  }
};

/// Exact check of every instance of C.1-C.5 (and monotonicity) within t_max.
inline ConditionReport validate_family(const SequenceFamily& f) {
  ConditionReport report;
  auto fail_at = [](ConditionCheck& c, const std::string& where) {
    if (c.pass) {
      c.pass = false;
      c.first_violation = where;
    }
  };

  ConditionCheck shape{"shape", 0, true, ""};
  shape.instances = 1;
  if (f.b < 1 || f.d < 2 || f.t_max < 1 ||
      f.blocks.size() != static_cast<std::size_t>(f.t_max))
    fail_at(shape, "parameters/block count");
  else
    for (int t = 1; t <= f.t_max; ++t)
      if (f.blocks[static_cast<std::size_t>(t) - 1].size() != static_cast<std::size_t>(t) * t)
        fail_at(shape, "block " + std::to_string(t) + " size");
  report.checks.push_back(shape);
  if (!shape.pass) return report;

  const unsigned long ud = static_cast<unsigned long>(f.d);

  // m^d cache, flat order
  std::vector<const Integer*> flat;
  std::vector<int> flat_t, flat_s;
  for (int t = 1; t <= f.t_max; ++t)
    for (int s = 1; s <= t * t; ++s) {
      flat.push_back(&f.m(t, s));
      flat_t.push_back(t);
      flat_s.push_back(s);
    }
  std::vector<Integer> powd(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) powd[i] = ipow(*flat[i], ud);

  ConditionCheck mono{"monotone", 0, true, ""};
  for (std::size_t i = 0; i + 1 < flat.size(); ++i) {
    ++mono.instances;
    if (!(*flat[i] < *flat[i + 1]))
      fail_at(mono, "flat index " + std::to_string(i + 1));
  }
  report.checks.push_back(mono);

  ConditionCheck c1{"C.1", 0, true, ""};
  for (int t = 1; t <= f.t_max; ++t) {
    ++c1.instances;
    if (!(f.m(t, 1) > block_threshold(t, f.d))) fail_at(c1, "t=" + std::to_string(t));
  }
  report.checks.push_back(c1);

  ConditionCheck c2{"C.2", 0, true, ""};
  for (int t = 1; t <= f.t_max; ++t)
    for (int s = 1; s < t * t; ++s) {
      ++c2.instances;
      Integer div = 2 * f.b * f.d * ipow(f.m(t, s), ud + 1);
      if (!divides(div, f.m(t, s + 1)))
        fail_at(c2, "t=" + std::to_string(t) + " s=" + std::to_string(s));
    }
  report.checks.push_back(c2);

  ConditionCheck c3{"C.3", 0, true, ""};
  for (int t = 1; t < f.t_max; ++t) {
    ++c3.instances;
    Integer div = 2 * f.b * f.d * ipow(f.m(t, t * t), ud + 1);
    if (!divides(div, f.m(t + 1, 1))) fail_at(c3, "t=" + std::to_string(t));
  }
  report.checks.push_back(c3);

  // C.4 / C.5 by cross-multiplication: m_{.,s}^d * threshold < m_{t,s'}
  auto flat_index = [](int t, int s) { return sigma(t) + s - 1; };

  ConditionCheck c4{"C.4", 0, true, ""};
  for (int t = 1; t <= f.t_max; ++t) {
    Integer thr = block_threshold(t, f.d);
    for (int s = 1; s <= t * t; ++s)
      for (int s2 = s + 1; s2 <= t * t; ++s2) {
        ++c4.instances;
        if (!(powd[static_cast<std::size_t>(flat_index(t, s))] * thr < f.m(t, s2)))
          fail_at(c4, "t=" + std::to_string(t) + " s=" + std::to_string(s) +
                          " s'=" + std::to_string(s2));
      }
  }
  report.checks.push_back(c4);

  ConditionCheck c5{"C.5", 0, true, ""};
  for (int t = 2; t <= f.t_max; ++t) {
    Integer thr = block_threshold(t, f.d);
    for (int tau = 1; tau < t; ++tau)
      for (int s = 1; s <= tau * tau; ++s)
        for (int s2 = 1; s2 <= t * t; ++s2) {
          ++c5.instances;
          if (!(powd[static_cast<std::size_t>(flat_index(tau, s))] * thr < f.m(t, s2)))
            fail_at(c5, "tau=" + std::to_string(tau) + " s=" + std::to_string(s) + " t=" +
                            std::to_string(t) + " s'=" + std::to_string(s2));
        }
  }
  report.checks.push_back(c5);

  return report;
}

// ---------------------------------------------------------------------------
// generators and signed sums

struct IPGenerators {
  int t = 0;
  std::vector<Integer> values;  // n_{t,1..t}
  Integer block_sum;            // n_t
};

/// n_{t,s} = sum of m_{t,(s-1)t+j} for j = 1..t, plus the whole-block sum n_t.
inline IPGenerators ip_generators(const SequenceFamily& f, int t) {
  if (t < 1 || t > f.t_max) throw std::out_of_range("ip_generators: t out of range");
  IPGenerators g;
  g.t = t;
  g.block_sum = 0;
  for (int s = 1; s <= t; ++s) {
    Integer n = 0;
    for (int j = 1; j <= t; ++j) n += f.m(t, (s - 1) * t + j);
    g.block_sum += n;
    g.values.push_back(std::move(n));
  }
  return g;
}

struct SignedTerm {
  int index;  // 1-based position in the source list
  int sign;   // +1 or -1
};

struct SignedSum {
  std::vector<SignedTerm> terms;  // strictly increasing indices, nonempty

  std::string label() const {
    std::string out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (i) out += ',';
      out += terms[i].sign > 0 ? '+' : '-';
      out += std::to_string(terms[i].index);
    }
    return out;
  }
};

// Enumerates every nonempty increasing index subset of `values` with every
// sign pattern, in deterministic order: subset bitmasks ascending (bit j =
// index j+1), then sign masks ascending (bit i flips the i-th smallest
// included index to -1). 3^k - 1 patterns for k values.
template <typename Fn>
inline void for_each_signed_sum(const std::vector<Integer>& values, Fn&& fn,
                                std::optional<int> max_terms = std::nullopt) {
  if (values.empty()) throw std::domain_error("for_each_signed_sum: empty value list");
  const int k = static_cast<int>(values.size());
  if (k > 24) throw ResourceError("for_each_signed_sum: too many values to enumerate");
  for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> idx;
    for (int j = 0; j < k; ++j)
      if (mask & (1u << j)) idx.push_back(j);
    if (max_terms && static_cast<int>(idx.size()) > *max_terms) continue;
    for (std::uint32_t signs = 0; signs < (1u << idx.size()); ++signs) {
      SignedSum sum;
      Integer total = 0;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        int sgn = (signs & (1u << i)) ? -1 : +1;
        sum.terms.push_back({idx[i] + 1, sgn});
        if (sgn > 0) total += values[static_cast<std::size_t>(idx[i])];
        else total -= values[static_cast<std::size_t>(idx[i])];
      }
      fn(sum, total);
    }
  }
}

inline std::vector<std::pair<SignedSum, Integer>> signed_sums(
    const std::vector<Integer>& values, std::optional<int> max_terms = std::nullopt) {
  std::vector<std::pair<SignedSum, Integer>> out;
  for_each_signed_sum(values, [&](const SignedSum& s, const Integer& v) { out.emplace_back(s, v); },
                      max_terms);
  return out;
}

// ---------------------------------------------------------------------------
// tail bounds

/// Closed-form bound 1/(tau^{2d} m_{tau,tau^2}^d 2^tau) on the total
/// coefficient mass of all blocks beyond tau.
inline Rational tail_bound(const SequenceFamily& f, int tau) {
  if (tau < 1 || tau > f.t_max) throw std::out_of_range("tail_bound: tau out of range");
  Integer den = ipow(Integer(tau), static_cast<unsigned long>(2 * f.d)) *
                ipow(f.m(tau, tau * tau), static_cast<unsigned long>(f.d)) *
                pow2(static_cast<unsigned long>(tau));
  return make_rational(1, den);
}

// |k| / (2^{tau+1} (tau+1)^{2d} 2^d m_{tau,tau^2}^d) as a num/den pair,
// uncanonicalized. Valid bound on |k| * (mass of blocks > tau) for any
// extension of the family: C.5 forces m_{t,1} > t^{2d+4} 2^{t+1} 2^d
// m_{tau,tau^2}^d for every t > tau, so the block-t mass is below
// t^{-2d} 2^{-(t+1)} 2^{-d} / m_{tau,tau^2}^d and the series is bounded
// by its first factor (tau+1)^{-2d} times the geometric tail 2^{-(tau+1)}.
inline std::pair<Integer, Integer> sharp_tail_phase_bound_raw(const SequenceFamily& f, int tau,
                                                              const Integer& k) {
  if (tau < 1 || tau > f.t_max)
    throw std::out_of_range("sharp_tail_phase_bound: tau out of range");
  Integer den = pow2(static_cast<unsigned long>(tau + 1 + f.d)) *
                ipow(Integer(tau + 1), static_cast<unsigned long>(2 * f.d)) *
                ipow(f.m(tau, tau * tau), static_cast<unsigned long>(f.d));
  return {abs(k), std::move(den)};
}

inline Rational sharp_tail_phase_bound(const SequenceFamily& f, int tau, const Integer& k) {
  auto [num, den] = sharp_tail_phase_bound_raw(f, tau, k);
  return make_rational(num, den);
}

// ---------------------------------------------------------------------------
// JSON interchange

inline nlohmann::json family_to_json(const SequenceFamily& f) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& blk : f.blocks) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& m : blk) row.push_back(m.get_str());
    blocks.push_back(std::move(row));
  }
  return {{"b", f.b.get_str()},
          {"d", f.d},
          {"t_max", f.t_max},
          {"blocks", std::move(blocks)},
          {"meta",
           {{"construction", "greedy-minimal"},
            {"tool", kToolVersion}}}};
}

inline SequenceFamily family_from_json(const nlohmann::json& j) {
  try {
    SequenceFamily f;
    f.b = parse_integer(j.at("b").get<std::string>());
    f.d = j.at("d").get<int>();
    f.t_max = j.at("t_max").get<int>();
    for (const auto& row : j.at("blocks")) {
      std::vector<Integer> blk;
      for (const auto& item : row) blk.push_back(parse_integer(item.get<std::string>()));
      f.blocks.push_back(std::move(blk));
    }
    if (f.blocks.size() != static_cast<std::size_t>(f.t_max))
      throw FamilyFormatError("family: t_max does not match block count");
    for (int t = 1; t <= f.t_max; ++t)
      if (f.blocks[static_cast<std::size_t>(t) - 1].size() != static_cast<std::size_t>(t) * t)
        throw FamilyFormatError("family: block " + std::to_string(t) + " must have t^2 entries");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw FamilyFormatError(std::string("family: malformed JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FamilyFormatError(std::string("family: bad integer: ") + e.what());
  }
}

inline void save_family(const SequenceFamily& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_family: cannot open " + path);
  out << family_to_json(f).dump(1) << "\n";
}

inline SequenceFamily load_family(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FamilyFormatError("load_family: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FamilyFormatError(std::string("load_family: parse error: ") + e.what());
  }
  return family_from_json(j);
}

// ---------------------------------------------------------------------------
// sum specs: "t=3;+1,-2,+3" (generator level) or "t=3;raw;+1,-2" (block level)

struct SumSpec {
  int t = 0;
  bool raw = false;       // indices refer to block entries m_{t,s} instead of generators n_{t,s}
  SignedSum sum;          // as written
  Integer value;          // the signed integer sum
  int raw_term_count = 0; // |F| at block-index level (generator terms expand to t entries each)
};

inline SumSpec parse_sum_spec(const SequenceFamily& f, const std::string& text) {
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("sum spec \"" + text + "\": " + why);
  };
  if (text.rfind("t=", 0) != 0) fail("expected leading t=<block>");
  auto semi = text.find(';');
  if (semi == std::string::npos) fail("expected ';' after block index");
  int t = 0;
  try {
    t = std::stoi(text.substr(2, semi - 2));
  } catch (...) {
    fail("bad block index");
  }
  if (t < 1 || t > f.t_max) throw std::out_of_range("sum spec: t out of range");

  std::string rest = text.substr(semi + 1);
  bool raw = false;
  if (rest.rfind("raw;", 0) == 0) {
    raw = true;
    rest = rest.substr(4);
  }

  SumSpec spec;
  spec.t = t;
  spec.raw = raw;
  const int limit = raw ? t * t : t;

  std::stringstream ss(rest);
  std::string item;
  int prev_index = 0;
  std::vector<Integer> gens;
  if (!raw) gens = ip_generators(f, t).values;
  spec.value = 0;
  while (std::getline(ss, item, ',')) {
    if (item.size() < 2 || (item[0] != '+' && item[0] != '-')) fail("terms must look like +2 or -2");
    int sign = item[0] == '+' ? +1 : -1;
    int index = 0;
    try {
      index = std::stoi(item.substr(1));
    } catch (...) {
      fail("bad term index");
    }
    if (index < 1 || index > limit) throw std::out_of_range("sum spec: term index out of range");
    if (index <= prev_index) fail("indices must be strictly increasing");
    prev_index = index;
    spec.sum.terms.push_back({index, sign});
    const Integer& v = raw ? f.m(t, index) : gens[static_cast<std::size_t>(index) - 1];
    if (sign > 0) spec.value += v;
    else spec.value -= v;
  }
  if (spec.sum.terms.empty()) fail("empty sum");
  spec.raw_term_count = static_cast<int>(spec.sum.terms.size()) * (raw ? 1 : t);
  return spec;
}

}  // namespace polyrec
