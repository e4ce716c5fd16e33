#pragma once

// Bivariate-normal layer. For a standard bivariate normal with correlation
// delta, the positive-quadrant (orthant) probability has the closed form
//
//   Q(delta) = 1/4 + arcsin(delta) / (2 pi),
//
// checked here against direct quadrature of the density and against Monte
// Carlo. Correlation reports map a certified interval for rho_hat(p(n))
// through the monotone Q to decide gamma(A cap T^{-p(n)} A) < 1/4 with
// gamma(A) = 1/2; the rigidity and weak-mixing diagnostics probe the two
// qualitative properties of the same system.

#include <polyrec/spectral.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace polyrec {

/// Closed form Q(delta); extends continuously to |delta| = 1.
inline double orthant_probability(double delta) {
  if (std::abs(delta) > 1.0) throw std::domain_error("orthant_probability: |delta| > 1");
  return 0.25 + std::asin(delta) / (2.0 * M_PI);
}

namespace detail {

template <typename F>
double simpson2d_rule(const F& f, double x0, double x1, double y0, double y1) {
  double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
  double s = f(x0, y0) + 4 * f(xm, y0) + f(x1, y0) + 4 * (f(x0, ym) + 4 * f(xm, ym) + f(x1, ym)) +
             f(x0, y1) + 4 * f(xm, y1) + f(x1, y1);
  return s * (x1 - x0) * (y1 - y0) / 36.0;
}

template <typename F>
double simpson2d_adaptive(const F& f, double x0, double x1, double y0, double y1, double whole,
                          double tol, int depth) {
  double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
  double q11 = simpson2d_rule(f, x0, xm, y0, ym);
  double q12 = simpson2d_rule(f, x0, xm, ym, y1);
  double q21 = simpson2d_rule(f, xm, x1, y0, ym);
  double q22 = simpson2d_rule(f, xm, x1, ym, y1);
  double refined = q11 + q12 + q21 + q22;
  if (depth <= 0 || std::abs(refined - whole) <= 15.0 * tol)
    return refined + (refined - whole) / 15.0;
  double t4 = tol / 4.0;
  return simpson2d_adaptive(f, x0, xm, y0, ym, q11, t4, depth - 1) +
         simpson2d_adaptive(f, x0, xm, ym, y1, q12, t4, depth - 1) +
         simpson2d_adaptive(f, xm, x1, y0, ym, q21, t4, depth - 1) +
         simpson2d_adaptive(f, xm, x1, ym, y1, q22, t4, depth - 1);
}

// smallest R with erfc(R/sqrt(2)) <= half_tol; the mass of the quadrant
// outside [0,R]^2 is at most P(X>R) + P(Y>R) = erfc(R/sqrt(2))
inline double truncation_radius(double half_tol) {
  double lo = 0.0, hi = 1.0;
  while (std::erfc(hi / std::sqrt(2.0)) > half_tol) hi *= 2.0;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::sqrt(2.0)) > half_tol) lo = mid;
    else hi = mid;
  }
  return hi;
}

}  // namespace detail

/// Quadrature oracle: integrates the bivariate density over [0,R]^2 with a
/// truncation + quadrature budget of tol/2 each.
inline double orthant_quadrature(double delta, double tol) {
  if (std::abs(delta) >= 1.0) throw std::domain_error("orthant_quadrature: |delta| >= 1");
  double det = 1.0 - delta * delta;
  double norm = 1.0 / (2.0 * M_PI * std::sqrt(det));
  auto density = [&](double x, double y) {
    return norm * std::exp(-0.5 * (x * x - 2.0 * delta * x * y + y * y) / det);
  };
  double r = detail::truncation_radius(tol / 2.0);
  double whole = detail::simpson2d_rule(density, 0.0, r, 0.0, r);
  return detail::simpson2d_adaptive(density, 0.0, r, 0.0, r, whole, tol / 2.0, 24);
}

struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Monte Carlo oracle: pairs (x, delta x + sqrt(1-delta^2) z) from a seeded
/// polar-method normal generator; counts both-positive.
inline McEstimate orthant_mc(double delta, long samples, std::uint64_t seed = kDefaultSeed) {
  if (std::abs(delta) >= 1.0) throw std::domain_error("orthant_mc: |delta| >= 1");
  std::mt19937_64 rng(seed);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
  bool have = false;
  double cached = 0.0;
  auto normal = [&] {
    if (have) {
      have = false;
      return cached;
    }
    while (true) {
      double u = 2.0 * uniform() - 1.0;
      double v = 2.0 * uniform() - 1.0;
      double s = u * u + v * v;
      if (s <= 0.0 || s >= 1.0) continue;
      double factor = std::sqrt(-2.0 * std::log(s) / s);
      cached = v * factor;
      have = true;
      return u * factor;
    }
  };
  double rot = std::sqrt(1.0 - delta * delta);
  long hits = 0;
  for (long i = 0; i < samples; ++i) {
    double x = normal();
    double y = delta * x + rot * normal();
    if (x > 0.0 && y > 0.0) ++hits;
  }
  double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

// ---------------------------------------------------------------------------
// correlation certificates

struct CorrelationReport {
  Integer n;
  Integer k;  // p(n)
  double rho_center = 0.0;
  double rho_radius = 0.0;
  double q_low = 0.0;
  double q_high = 0.0;
  bool passes_quarter = false;
  bool passes_sixth_eps = false;
  bool certifiable = true;  // false when the rho interval touches +-1
  static constexpr double marginal = 0.5;
  std::string sum_label;  // which signed sum produced n (reporting aid)
};

namespace detail {

inline double nudge_up(double x, int ulps = 4) {
  for (int i = 0; i < ulps; ++i) x = std::nextafter(x, 2.0);
  return x;
}
inline double nudge_down(double x, int ulps = 4) {
  for (int i = 0; i < ulps; ++i) x = std::nextafter(x, -2.0);
  return x;
}

}  // namespace detail

/// Maps the certified rho_hat(p(n)) interval through the monotone Q.
/// Pass flags require strict inequality of the interval's upper endpoint.
inline CorrelationReport correlation_report(const TruncatedMeasureSpec& spec,
                                            const IntPolynomial& p, const Integer& n,
                                            double epsilon, Method mode = Method::exact_enum,
                                            const EnumBudget& budget = {},
                                            std::uint64_t seed = kDefaultSeed) {
  if (n == 0) throw std::domain_error("correlation_report: n must be nonzero");
  CorrelationReport rep;
  rep.n = n;
  rep.k = p.evaluate(n);
  FourierEstimate est = rho_hat(spec, rep.k, mode, /*full_measure=*/true, budget, seed);
  rep.rho_center = est.re;
  rep.rho_radius = est.radius;
  double lo = est.re - est.radius, hi = est.re + est.radius;
  rep.certifiable = std::abs(est.re) + est.radius < 1.0;
  lo = std::max(lo, -1.0);
  hi = std::min(hi, 1.0);
  rep.q_low = detail::nudge_down(orthant_probability(lo));
  rep.q_high = detail::nudge_up(orthant_probability(hi));
  rep.passes_quarter = rep.certifiable && rep.q_high < 0.25;
  rep.passes_sixth_eps = rep.certifiable && rep.q_high < 1.0 / 6.0 + epsilon;
  return rep;
}

struct TheoremAReport {
  std::vector<CorrelationReport> rows;  // one per signed generator sum
  double max_q_high = 0.0;
  double margin = 0.0;  // 1/4 - max_q_high
  bool all_pass_quarter = false;
};

/// One correlation report per signed sum of the block-t generators
/// (3^t - 1 rows, deterministic enumeration order).
inline TheoremAReport theorem_a_report(const SequenceFamily& f, const IntPolynomial& p, int t,
                                       double epsilon, Method mode = Method::exact_enum,
                                       int T_trunc = 0, const EnumBudget& budget = {},
                                       std::uint64_t seed = kDefaultSeed) {
  IPGenerators gen = ip_generators(f, t);
  if (T_trunc == 0) T_trunc = std::max(2, t);
  TruncatedMeasureSpec spec{f, T_trunc};
  spec.require_valid();

  auto sums = signed_sums(gen.values);
  auto rows = parallel_map<CorrelationReport>(sums.size(), [&](std::size_t i) {
    CorrelationReport r = correlation_report(spec, p, sums[i].second, epsilon, mode, budget, seed);
    r.sum_label = sums[i].first.label();
    return r;
  });

  TheoremAReport rep;
  rep.rows = std::move(rows);
  rep.all_pass_quarter = true;
  for (const auto& r : rep.rows) {
    rep.max_q_high = std::max(rep.max_q_high, r.q_high);
    rep.all_pass_quarter = rep.all_pass_quarter && r.passes_quarter;
  }
  rep.margin = 0.25 - rep.max_q_high;
  return rep;
}

/// rho_hat(2 p(n_t)) with certified radius; tends to 1 as t grows.
inline FourierEstimate rigidity_diagnostic(const TruncatedMeasureSpec& spec,
                                           const IntPolynomial& p, int t,
                                           Method mode = Method::exact_enum,
                                           const EnumBudget& budget = {},
                                           std::uint64_t seed = kDefaultSeed) {
  if (t < 1 || t > spec.family.t_max) throw std::out_of_range("rigidity_diagnostic: t out of range");
  Integer k = 2 * p.evaluate(ip_generators(spec.family, t).block_sum);
  return rho_hat(spec, k, mode, /*full_measure=*/true, budget, seed);
}

struct MixingRow {
  long shift = 0;  // m
  FourierEstimate shifted;  // mu_hat(p(n_t) + m)
  FourierEstimate base;     // mu_hat(m)
  double defect = 0.0;      // |mu_hat(p(n_t)+m) + mu_hat(m)/2|
  double combined_radius = 0.0;
};

/// Defect table |mu_hat(p(n_t)+m) + mu_hat(m)/2| for |m| <= m_range.
inline std::vector<MixingRow> weak_mixing_diagnostic(const TruncatedMeasureSpec& spec,
                                                     const IntPolynomial& p, int t, int m_range,
                                                     Method mode = Method::exact_enum,
                                                     const EnumBudget& budget = {},
                                                     std::uint64_t seed = kDefaultSeed) {
  if (t < 1 || t > spec.family.t_max)
    throw std::out_of_range("weak_mixing_diagnostic: t out of range");
  if (m_range < 0 || m_range > 10)
    throw std::domain_error("weak_mixing_diagnostic: |m| range capped at 10");
  Integer kn = p.evaluate(ip_generators(spec.family, t).block_sum);
  std::vector<MixingRow> rows;
  for (long m = -m_range; m <= m_range; ++m) {
    MixingRow row;
    row.shift = m;
    row.shifted = mu_hat(spec, kn + m, mode, /*full_measure=*/true, budget, seed);
    row.base = mu_hat(spec, Integer(m), mode, /*full_measure=*/true, budget, seed);
    row.defect = std::hypot(row.shifted.re + 0.5 * row.base.re,
                            row.shifted.im + 0.5 * row.base.im);
    row.combined_radius = row.shifted.radius + 0.5 * row.base.radius + 0x1p-50;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace polyrec
