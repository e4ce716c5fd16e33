// Acceptance suite: one line per criterion, exit 0 only if all pass.
// Every tolerance is pinned here; nothing is deferred to calibration.

#include <polyrec/family.hpp>
#include <polyrec/gaussian.hpp>
#include <polyrec/lemmas.hpp>
#include <polyrec/parity.hpp>
#include <polyrec/polynomial.hpp>
#include <polyrec/spectral.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace polyrec;

namespace {

int failures = 0;
std::chrono::steady_clock::time_point t_last = std::chrono::steady_clock::now();

void criterion(int id, const std::string& what, bool ok) {
  auto now = std::chrono::steady_clock::now();
  double secs = std::chrono::duration<double>(now - t_last).count();
  t_last = now;
  std::printf("%s criterion %2d: %s  (%.1fs)\n", ok ? "PASS" : "FAIL", id, what.c_str(), secs);
  std::fflush(stdout);
  if (!ok) ++failures;
}

}  // namespace

int main() {
  const IntPolynomial square = IntPolynomial::parse("0,1");  // x^2

  // ---- 1: orthant probability, three routes -------------------------------
  {
    bool closed = std::abs(orthant_probability(-0.5) - 1.0 / 6.0) <= 1e-12;
    bool quad = std::abs(orthant_quadrature(-0.5, 1e-9) - 1.0 / 6.0) <= 1e-9;
    McEstimate mc = orthant_mc(-0.5, 10'000'000, kDefaultSeed);
    bool mc_ok = std::abs(mc.value - 1.0 / 6.0) <= 3.0 * mc.stderr_;
    criterion(1, "orthant probability at -1/2: closed form 1e-12, quadrature 1e-9, MC 3 sigma",
              closed && quad && mc_ok);
  }

  // ---- 2: orthant symmetry sweep -------------------------------------------
  {
    bool ok = true;
    for (int i = 0; i <= 36; ++i) {
      double delta = -0.9 + 0.05 * i;
      ok = ok &&
           std::abs(orthant_probability(delta) + orthant_probability(-delta) - 0.5) <= 1e-14;
    }
    criterion(2, "Q(d) + Q(-d) = 1/2 within 1e-14 on the 37-point grid", ok);
  }

  // ---- 3: parity chain ------------------------------------------------------
  {
    bool vs_brute = true;
    for (int n = 1; n <= 9; ++n)
      vs_brute = vs_brute && expectation(n) == brute_force_expectation(n);
    bool closed = true;
    for (int n = 1; n <= 30; ++n) {
      Integer p3 = ipow(Integer(3), static_cast<unsigned long>(n));
      Rational want = make_rational(-1, 2) + make_rational(1, p3) +
                      make_rational(n % 2 == 0 ? 1 : -1, 2 * p3);
      closed = closed && expectation(n) == want;
    }
    Rational gap30 = expectation(30) + make_rational(1, 2);
    if (gap30 < 0) gap30 = -gap30;
    bool limit = gap30 < make_rational(1, ipow(Integer(10), 12));
    criterion(3, "parity chain equals brute force (N<=9), closed form (N<=30), |E_30+1/2|<1e-12",
              vs_brute && closed && limit);
  }

  // ---- 4: family construction + validation ---------------------------------
  SequenceFamily fam = construct_family(1, 2, 3);
  {
    ConditionReport rep = validate_family(fam);
    std::size_t digits = mpz_sizeinbase(fam.m(3, 9).get_mpz_t(), 10);
    bool band = digits >= 1'000'000 && digits <= 10'000'000;
    criterion(4, "construct_family(1,2,3) passes C.1-C.5 exactly; final term has " +
                     std::to_string(digits) + " digits (band 1M..10M)",
              rep.all_pass() && band);
  }

  const TruncatedMeasureSpec stage3{fam, 3};
  const Integer n2 = ip_generators(fam, 2).block_sum;
  const Integer n3 = ip_generators(fam, 3).block_sum;

  // ---- 5: lemma suites ------------------------------------------------------
  {
    LemmaReport integral = verify_integrality(fam);
    LemmaReport off2 = verify_offdiagonal(fam, 2);
    LemmaReport dia2 = verify_diagonal(fam, 2);
    LemmaBudget sampled;  // defaults: cap 4096 -> t=3 sampled with 100 + extremes
    LemmaReport off3 = verify_offdiagonal(fam, 3, sampled);
    LemmaReport dia3 = verify_diagonal(fam, 3, sampled);
    Rational bound2(1, 128), bound3(1, 1296);
    bool zero = integral.pass() && off2.pass() && dia2.pass() && off3.pass() && dia3.pass();
    bool tight2 = off2.max_dist < bound2 && dia2.max_dist < bound2;
    bool tight3 = off3.max_dist < bound3 && dia3.max_dist < bound3;
    bool shrink = std::max(off3.max_dist, dia3.max_dist) < std::max(off2.max_dist, dia2.max_dist) &&
                  std::max(off3.max_slack, dia3.max_slack) <
                      std::max(off2.max_slack, dia2.max_slack);
    criterion(5,
              "estimate suites: 0 violations (t=2 exhaustive, t=3 sampled); max dist < 1/128 at "
              "t=2, < 1/1296 at t=3; slack shrinks",
              zero && tight2 && tight3 && shrink);
  }

  // ---- 6: headline counterexample ------------------------------------------
  std::vector<std::pair<SignedSum, Integer>> gen3_sums = signed_sums(ip_generators(fam, 3).values);
  {
    TheoremAReport rep = theorem_a_report(fam, square, 3, 0.05, Method::exact_enum, 3);
    bool rows = rep.rows.size() == 26 && gen3_sums.size() == 26;
    bool endpoints = true;
    for (const auto& r : rep.rows)
      endpoints = endpoints && r.certifiable && (r.rho_center + r.rho_radius <= -0.3);
    bool margin = rep.all_pass_quarter && rep.margin >= 0.04;
    criterion(6,
              "all 26 signed generator sums at t=3: rho upper endpoint <= -0.3, every row passes "
              "1/4, margin >= 0.04",
              rows && endpoints && margin);
  }

  // ---- 7: stage consistency --------------------------------------------------
  {
    FourierEstimate factor2 = block_factor(fam, 2, square.evaluate(n2));
    double e4 = to_float(expectation(4));  // -13/27
    bool near = std::abs(factor2.re - e4) <= 0.05 && std::abs(factor2.im) <= 0.05;

    bool consistent = true;
    std::vector<Integer> block2;
    for (int s = 1; s <= 4; ++s) block2.push_back(fam.m(2, s));
    TruncatedMeasureSpec stage2{fam, 2};
    for_each_signed_sum(block2, [&](const SignedSum& pattern, const Integer& n) {
      FourierEstimate mu = mu_hat(stage2, square.evaluate(n), Method::exact_enum, true);
      FourierEstimate pa = parity_approx(fam, square, 2, static_cast<int>(pattern.terms.size()));
      consistent = consistent &&
                   std::hypot(mu.re - pa.re, mu.im - pa.im) <= mu.radius + pa.radius;
    });
    for (const auto& [pattern, n] : gen3_sums) {
      FourierEstimate mu = mu_hat(stage3, square.evaluate(n), Method::exact_enum, true);
      FourierEstimate pa =
          parity_approx(fam, square, 3, static_cast<int>(pattern.terms.size()) * 3);
      consistent = consistent &&
                   std::hypot(mu.re - pa.re, mu.im - pa.im) <= mu.radius + pa.radius;
    }
    criterion(7,
              "block-2 factor at p(n_2) within 0.05 of -13/27; parity and full-measure intervals "
              "intersect for all sums at t=2,3",
              near && consistent);
  }

  // ---- 8: below/above-block structure ---------------------------------------
  {
    bool below = true;
    for (const auto& u : block_phase_bases(fam, 2, square.evaluate(n3)))
      below = below && u.value() == 0;
    FourierEstimate b2 = block_factor(fam, 2, square.evaluate(n3));
    below = below && b2.re == 1.0 && b2.im == 0.0 && b2.radius == 0.0;
    Integer mixed = ip_generators(fam, 3).values[0] - ip_generators(fam, 3).values[1];
    FourierEstimate b2m = block_factor(fam, 2, square.evaluate(mixed));
    below = below && b2m.re == 1.0 && b2m.im == 0.0;

    FourierEstimate b3 = block_factor(fam, 3, square.evaluate(n2));
    bool above = std::abs(b3.re - 1.0) <= b3.radius + 1e-3 && std::abs(b3.im) <= b3.radius + 1e-3;
    criterion(8, "block 2 at p(block-3 sums) is exactly 1; block 3 at p(n_2) within radius+1e-3 "
                 "of 1",
              below && above);
  }

  // ---- 9: rigidity + weak mixing --------------------------------------------
  {
    TruncatedMeasureSpec stage2{fam, 2};
    FourierEstimate rig2 = rigidity_diagnostic(stage2, square, 2);
    FourierEstimate rig3 = rigidity_diagnostic(stage3, square, 3);
    double lower2 = rig2.re - rig2.radius, lower3 = rig3.re - rig3.radius;
    bool rig = lower2 >= 0.8 && lower3 > lower2 && rig3.radius < rig2.radius;

    bool mix = true;
    for (const auto& row : weak_mixing_diagnostic(stage3, square, 3, 5)) {
      mix = mix && row.defect <= row.combined_radius + 0.1;
      mix = mix && row.base.modulus() <= 1.0 + row.base.radius;
    }
    criterion(9,
              "rigidity rho(2p(n_t)) lower endpoint >= 0.8 at t=2, larger at t=3; mixing defect "
              "<= radius + 0.1 for |m| <= 5",
              rig && mix);
  }

  // ---- 10: Monte Carlo cross-check ------------------------------------------
  {
    bool ok = true;
    struct Pair {
      int t;
      Integer k;
    };
    std::vector<Pair> pairs;
    pairs.push_back({2, square.evaluate(n2)});
    pairs.push_back({2, square.evaluate(ip_generators(fam, 2).values[0] -
                                        ip_generators(fam, 2).values[1])});
    pairs.push_back({3, square.evaluate(n3)});
    for (const auto& [t, k] : pairs) {
      FourierEstimate exact = block_factor(fam, t, k);
      FourierEstimate mc = block_factor(fam, t, k, Method::monte_carlo);
      ok = ok && std::hypot(mc.re - exact.re, mc.im - exact.im) <= mc.radius + exact.radius;
    }
    criterion(10, "MC block factors (1e6 samples, fixed seed) within 3 sigma of exact at t=2,3",
              ok);
  }

  if (failures) std::printf("%d criterion(s) FAILED\n", failures);
  else std::printf("all acceptance criteria passed\n");
  return failures == 0 ? 0 : 1;
}
