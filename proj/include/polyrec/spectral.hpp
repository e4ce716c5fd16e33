#pragma once

// Fourier coefficients of the stage-T truncation of the constructed
// measure. The measure is the push-forward of the uniform product measure
// on configurations omega in {0,1,2}^{t^2} (blocks t = 2..T) under
//
//   g(omega) = sum_t [ sum_s 1_{{0,1}}(omega(t,s)) / (2 b m_{t,s}^d)
//            + sum_{s<s'} 1_{"one 0, one 1"} / (2 b d m_{t,s} m_{t,s'}^{d-1}) ]
//
// taken mod 1. Independence across blocks factorizes mu_hat(k) into a
// product of per-block averages. Per-block bases k/denominator mod 1 are
// reduced exactly (one big divmod each); the per-configuration averaging
// runs in floating point with the accumulated error folded into a
// certified radius. The optional full-measure radius extends the stage-T
// certificate to the untruncated measure via the sharp tail phase bound.

#include <polyrec/family.hpp>
#include <polyrec/parallel.hpp>
#include <polyrec/parity.hpp>
#include <polyrec/polynomial.hpp>

#include <json.hpp>

#include <cmath>
#include <complex>
#include <random>

namespace polyrec {

struct TruncatedMeasureSpec {
  const SequenceFamily& family;
  int T_trunc;  // include blocks t = 2..T_trunc

  void require_valid() const {
    if (T_trunc < 2 || T_trunc > family.t_max)
      throw std::out_of_range("TruncatedMeasureSpec: need 2 <= T_trunc <= t_max");
  }
};

enum class Target { stage_T_measure, full_measure };
enum class Method { exact_enum, monte_carlo, parity_approx };

inline const char* to_string(Target t) {
  return t == Target::stage_T_measure ? "stage_T_measure" : "full_measure";
}
inline const char* to_string(Method m) {
  switch (m) {
    case Method::exact_enum: return "exact_enum";
    case Method::monte_carlo: return "monte_carlo";
    default: return "parity_approx";
  }
}

struct FourierEstimate {
  double re = 0.0;
  double im = 0.0;
  double radius = 0.0;       // true target value lies within radius (statistical for MC)
  Target target = Target::stage_T_measure;
  Method method = Method::exact_enum;
  bool statistical = false;  // radius is a 3-sigma CLT bound, not a certificate

  double modulus() const { return std::hypot(re, im); }

  nlohmann::json to_json() const {
    return {{"re", re},         {"im", im},
            {"radius", radius}, {"target", polyrec::to_string(target)},
            {"method", polyrec::to_string(method)}, {"statistical", statistical}};
  }
};

struct EnumBudget {
  long enumeration_cap = 43'046'721;  // 3^16
  long mc_samples = 1'000'000;
};

// ---------------------------------------------------------------------------
// phase bases

namespace detail {

// Float phase bases for one block: diag[s-1] = k/(2 b m_{t,s}^d) mod 1,
// pair[(s,s')] = k/(2 b d m_{t,s} m_{t,s'}^{d-1}) mod 1, each rounded to
// nearest after the exact reduction.
struct BlockBases {
  int width = 0;
  std::vector<double> diag;
  std::vector<double> pair;  // (1,2),(1,3),...,(2,3),... lexicographic
  int nonzero = 0;           // bases with a nonzero exact residue

  int pair_index(int s, int s2) const {
    // s < s2, both 1-based
    return (s - 1) * width - (s - 1) * s / 2 + (s2 - s - 1);
  }
};

// Signed representative: residues of |k| enter with sign(k), so the phase
// of -k is the exact float negation of the phase of k and exact
// enumeration is Hermitian bit for bit.
inline double base_to_double(const Integer& k, const Integer& den, int& nonzero) {
  Integer rem;
  Integer ka = abs(k);
  mpz_fdiv_r(rem.get_mpz_t(), ka.get_mpz_t(), den.get_mpz_t());
  if (rem == 0) return 0.0;
  ++nonzero;
  double v = quotient_to_double(rem, den);
  return k < 0 ? -v : v;
}

inline BlockBases block_bases_float(const SequenceFamily& f, int t, const Integer& k) {
  if (t < 2 || t > f.t_max) throw std::out_of_range("block bases: t out of range");
  BlockBases b;
  b.width = t * t;
  const unsigned long ud = static_cast<unsigned long>(f.d);
  for (int s = 1; s <= b.width; ++s)
    b.diag.push_back(base_to_double(k, 2 * f.b * ipow(f.m(t, s), ud), b.nonzero));
  for (int s = 1; s < b.width; ++s)
    for (int s2 = s + 1; s2 <= b.width; ++s2)
      b.pair.push_back(
          base_to_double(k, 2 * f.b * f.d * f.m(t, s) * ipow(f.m(t, s2), ud - 1), b.nonzero));
  return b;
}

}  // namespace detail

/// Exact phase bases of block t at frequency k: t^2 diagonal residues then
/// the C(t^2,2) pair residues, in the same order as the float path.
inline std::vector<UnitFraction> block_phase_bases(const SequenceFamily& f, int t,
                                                   const Integer& k) {
  if (t < 2 || t > f.t_max) throw std::out_of_range("block_phase_bases: t out of range");
  std::vector<UnitFraction> out;
  const unsigned long ud = static_cast<unsigned long>(f.d);
  const int width = t * t;
  for (int s = 1; s <= width; ++s)
    out.push_back(reduce_mod1(make_rational(k, 2 * f.b * ipow(f.m(t, s), ud))));
  for (int s = 1; s < width; ++s)
    for (int s2 = s + 1; s2 <= width; ++s2)
      out.push_back(
          reduce_mod1(make_rational(k, 2 * f.b * f.d * f.m(t, s) * ipow(f.m(t, s2), ud - 1))));
  return out;
}

// ---------------------------------------------------------------------------
// block factors

namespace detail {

struct KahanSum {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

inline double config_phase(const BlockBases& b, const int* digit) {
  double phase = 0.0;
  for (int s = 0; s < b.width; ++s) {
    int ds = digit[s];
    if (ds == 2) continue;
    phase += b.diag[static_cast<std::size_t>(s)];
    for (int s2 = s + 1; s2 < b.width; ++s2) {
      int d2 = digit[s2];
      if (d2 != 2 && d2 != ds)
        phase += b.pair[static_cast<std::size_t>(b.pair_index(s + 1, s2 + 1))];
    }
  }
  return phase;
}

// Accumulation error: each nonzero base is off by at most 2^-53, each of
// the <= B additions by at most ulp(phase) <= 2^-45 at these magnitudes,
// the 2*pi scaling and cos/sin by a few ulps, and the chunked Kahan mean
// by ~2^-48. 2*pi*||phase error|| bounds the value error.
inline double enum_radius(int nonzero_bases) {
  return 2.0 * M_PI * nonzero_bases * (0x1p-53 + 0x1p-45) + 8 * 0x1p-52 + 0x1p-48;
}

}  // namespace detail

/// Average of e^{2 pi i k g_t} over one block, by exact enumeration of all
/// 3^{t^2} configurations or by seeded Monte Carlo.
inline FourierEstimate block_factor(const SequenceFamily& f, int t, const Integer& k,
                                    Method mode = Method::exact_enum,
                                    const EnumBudget& budget = {},
                                    std::uint64_t seed = kDefaultSeed) {
  detail::BlockBases bases = detail::block_bases_float(f, t, k);
  const int width = bases.width;

  // every residue exactly zero: the factor is exactly 1
  if (bases.nonzero == 0)
    return {1.0, 0.0, 0.0, Target::stage_T_measure, mode, false};

  if (mode == Method::exact_enum) {
    double configs = std::pow(3.0, width);
    if (configs > static_cast<double>(budget.enumeration_cap))
      throw ResourceError("block_factor: 3^" + std::to_string(width) +
                          " configurations exceed the enumeration cap");
    const long total = static_cast<long>(configs);
    const long chunk = 1 << 16;  // fixed chunking: results independent of worker count
    const long nchunks = (total + chunk - 1) / chunk;

    struct Partial {
      double re = 0.0, im = 0.0;
    };
    auto partials = parallel_map<Partial>(static_cast<std::size_t>(nchunks), [&](std::size_t ci) {
      long begin = static_cast<long>(ci) * chunk;
      long end = std::min(begin + chunk, total);
      int digit[32] = {0};
      long idx = begin;
      for (int s = 0; s < width; ++s) {
        digit[s] = static_cast<int>(idx % 3);
        idx /= 3;
      }
      detail::KahanSum re, im;
      for (long i = begin; i < end; ++i) {
        double phase = detail::config_phase(bases, digit);
        re.add(std::cos(2.0 * M_PI * phase));
        im.add(std::sin(2.0 * M_PI * phase));
        for (int s = 0; s < width; ++s) {  // mixed-radix increment
          if (++digit[s] < 3) break;
          digit[s] = 0;
        }
      }
      return Partial{re.sum, im.sum};
    });
    detail::KahanSum re, im;
    for (const auto& p : partials) {
      re.add(p.re);
      im.add(p.im);
    }
    return {re.sum / static_cast<double>(total), im.sum / static_cast<double>(total),
            detail::enum_radius(bases.nonzero), Target::stage_T_measure, Method::exact_enum,
            false};
  }

  // Monte Carlo: seeded, single stream, radius = 3 sigma / sqrt(n)
  std::mt19937_64 rng(seed);
  detail::KahanSum re, im, re2, im2;
  int digit[32];
  const long n = budget.mc_samples;
  for (long i = 0; i < n; ++i) {
    for (int s = 0; s < width; ++s) digit[s] = static_cast<int>(rng() % 3);
    double phase = detail::config_phase(bases, digit);
    double c = std::cos(2.0 * M_PI * phase), s_ = std::sin(2.0 * M_PI * phase);
    re.add(c);
    im.add(s_);
    re2.add(c * c);
    im2.add(s_ * s_);
  }
  double mean_re = re.sum / static_cast<double>(n);
  double mean_im = im.sum / static_cast<double>(n);
  double var = std::max(0.0, re2.sum / n - mean_re * mean_re) +
               std::max(0.0, im2.sum / n - mean_im * mean_im);
  double radius = 3.0 * std::sqrt(var / static_cast<double>(n));
  return {mean_re, mean_im, radius, Target::stage_T_measure, Method::monte_carlo, true};
}

// ---------------------------------------------------------------------------
// measure coefficients

/// mu_hat(k) for the stage-T measure: product of the block factors for
/// t = 2..T_trunc. With full_measure set, the radius additionally covers
/// the untruncated measure via the sharp tail phase bound at tau = T.
inline FourierEstimate mu_hat(const TruncatedMeasureSpec& spec, const Integer& k,
                              Method mode = Method::exact_enum, bool full_measure = false,
                              const EnumBudget& budget = {}, std::uint64_t seed = kDefaultSeed) {
  spec.require_valid();
  std::complex<double> acc(1.0, 0.0);
  double radius = 0.0;
  bool any_mc = false, any_stat = false;
  for (int t = 2; t <= spec.T_trunc; ++t) {
    FourierEstimate factor = block_factor(spec.family, t, k, mode, budget, seed + t);
    any_mc |= factor.method == Method::monte_carlo;
    any_stat |= factor.statistical;
    acc *= std::complex<double>(factor.re, factor.im);
    // |prod (z_t + e_t) - prod z_t| <= prod (1 + r_t) - 1 for |z_t| <= 1
    radius = radius + factor.radius + radius * factor.radius;
    radius += 0x1p-51;  // complex multiply rounding
  }
  if (full_measure) {
    auto [num, den] = sharp_tail_phase_bound_raw(spec.family, spec.T_trunc, k);
    double tail = quotient_to_double(num, den);
    radius += 2.0 * M_PI * tail * (1.0 + 0x1p-40) + 0x1p-52;
  }
  return {acc.real(), acc.imag(), radius,
          full_measure ? Target::full_measure : Target::stage_T_measure,
          any_mc ? Method::monte_carlo : Method::exact_enum, any_stat};
}

/// rho_hat(k) = Re mu_hat(k): the symmetrized measure has the same radius
/// and no imaginary part.
inline FourierEstimate rho_hat(const TruncatedMeasureSpec& spec, const Integer& k,
                               Method mode = Method::exact_enum, bool full_measure = false,
                               const EnumBudget& budget = {}, std::uint64_t seed = kDefaultSeed) {
  FourierEstimate mu = mu_hat(spec, k, mode, full_measure, budget, seed);
  mu.im = 0.0;
  return mu;
}

/// Parity-chain approximation of mu_hat(p(n)) for n a signed sum over
/// raw_term_count block-tau entries: the value is the exact chain
/// expectation E_{|F|}, the radius is 2 pi sum_c |b_c| / 2^{tau-1}.
inline FourierEstimate parity_approx(const SequenceFamily& f, const IntPolynomial& p, int tau,
                                     int raw_term_count) {
  if (tau < 1 || tau > f.t_max) throw std::out_of_range("parity_approx: tau out of range");
  if (raw_term_count < 1 || raw_term_count > tau * tau)
    throw std::out_of_range("parity_approx: |F| out of range");
  double value = to_float(expectation(raw_term_count));
  Rational phase_bound = make_rational(p.coeff_abs_sum(), pow2(static_cast<unsigned long>(tau - 1)));
  double radius = 2.0 * M_PI * to_float(phase_bound) * (1.0 + 0x1p-40);
  return {value, 0.0, radius, Target::full_measure, Method::parity_approx, false};
}

}  // namespace polyrec
