// polyrec: exact construction and verification of a Gaussian-system
// counterexample to polynomial Khintchine-type recurrence along IP_0 sets.
//
// Subcommands: generate, validate, lemmas, parity, fourier, correlation,
// theorem-a, rigidity, mixing. Machine-readable JSON/CSV everywhere;
// exit status 0 exactly when every certificate or validation in the run
// passed. Distinct exit codes: 1 failed certificate, 2 usage, 3 malformed
// family file, 4 out-of-range/domain, 5 budget exceeded.

#include <polyrec/family.hpp>
#include <polyrec/gaussian.hpp>
#include <polyrec/lemmas.hpp>
#include <polyrec/parity.hpp>
#include <polyrec/polynomial.hpp>
#include <polyrec/spectral.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace polyrec;

constexpr int kExitOk = 0;
constexpr int kExitCertificate = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFamilyFile = 3;
constexpr int kExitRange = 4;
constexpr int kExitBudget = 5;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << text;
}

const char* condition_formula(const std::string& id) {
  if (id == "C.1") return "m_{t,1} > t^{2d+4} 2^{t+1} 2^d";
  if (id == "C.2") return "(2 b d m_{t,s}^{d+1}) | m_{t,s+1}";
  if (id == "C.3") return "(2 b d m_{t,t^2}^{d+1}) | m_{t+1,1}";
  if (id == "C.4") return "m_{t,s}^d / m_{t,s'} < 1/(t^{2d+4} 2^{t+1} 2^d), s < s'";
  if (id == "C.5") return "m_{tau,s}^d / m_{t,s'} < 1/(t^{2d+4} 2^{t+1} 2^d), tau < t";
  if (id == "monotone") return "flat sequence strictly increasing";
  return "structural shape";
}

void print_condition_report(const ConditionReport& rep, bool explain) {
  for (const auto& c : rep.checks) {
    std::cout << c.condition << ": " << (c.pass ? "pass" : "FAIL") << " (" << c.instances
              << " instances";
    if (!c.pass) std::cout << ", first violation at " << c.first_violation;
    std::cout << ")";
    if (explain) std::cout << "  [" << condition_formula(c.condition) << "]";
    std::cout << "\n";
  }
}

const char* lemma_explanation(const std::string& lemma) {
  if (lemma == "integrality")
    return "m_{tau,s}/(2 b d m_{t,s'} m_{t,s''}^{d-1}) integral, by C.2/C.3";
  if (lemma == "offdiagonal")
    return "||(sum xi m)^c/(2 b d m_s m_{s'}^{d-1}) - [xi_s xi_{s'}^{d-1}/2b]|| < 1/(t^4 2^{t+1})";
  if (lemma == "diagonal")
    return "||(sum xi m)^c/(2 b m_s^d) - [xi_s^d/2b]|| < 1/(t^4 2^{t+1})";
  return "block mass < t^4/m_{t,1}, partial sums under the closed-form tail bound";
}

// frequency/sum resolution shared by fourier and correlation
struct FrequencyArg {
  Integer value;                 // the resolved frequency k
  Integer base;                  // n before the polynomial was applied
  bool polynomial_applied = false;
  std::optional<SumSpec> spec;   // set when a sum-spec was given
};

FrequencyArg resolve_frequency(const SequenceFamily& f, const std::string& text,
                               const std::optional<IntPolynomial>& p) {
  FrequencyArg arg;
  if (text.rfind("t=", 0) == 0) {
    arg.spec = parse_sum_spec(f, text);
    arg.base = arg.spec->value;
  } else {
    arg.base = parse_integer(text);
  }
  if (p) {
    arg.value = p->evaluate(arg.base);
    arg.polynomial_applied = true;
  } else {
    arg.value = arg.base;
  }
  return arg;
}

Method parse_method(const std::string& name) {
  if (name == "exact") return Method::exact_enum;
  if (name == "mc") return Method::monte_carlo;
  if (name == "parity") return Method::parity_approx;
  throw std::invalid_argument("unknown method " + name);
}

nlohmann::json correlation_to_json(const CorrelationReport& r) {
  return {{"n", r.n.get_str()},
          {"k", r.k.get_str()},
          {"rho_center", r.rho_center},
          {"rho_radius", r.rho_radius},
          {"Q_low", r.q_low},
          {"Q_high", r.q_high},
          {"passes_quarter", r.passes_quarter},
          {"passes_sixth_eps", r.passes_sixth_eps},
          {"certifiable", r.certifiable},
          {"marginal", CorrelationReport::marginal}};
}

std::string correlation_csv_header() {
  return "n,k,rho_center,rho_radius,Q_low,Q_high,passes_quarter,passes_sixth_eps\n";
}

std::string correlation_csv_row(const CorrelationReport& r) {
  return r.n.get_str() + "," + r.k.get_str() + "," + fmt_double(r.rho_center) + "," +
         fmt_double(r.rho_radius) + "," + fmt_double(r.q_low) + "," + fmt_double(r.q_high) + "," +
         (r.passes_quarter ? "true" : "false") + "," + (r.passes_sixth_eps ? "true" : "false") +
         "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"exact-arithmetic engine for negatively correlated polynomial return times\n"
               "of a Gaussian system along signed finite sums"};
  app.require_subcommand(1);
  bool explain = false;
  app.add_flag("--explain", explain, "annotate each check with the condition it instantiates");

  // generate
  auto* generate = app.add_subcommand("generate", "construct a greedy-minimal family");
  std::string gen_b = "1";
  int gen_d = 2, gen_tmax = 3;
  long gen_budget = kDefaultDigitBudget;
  std::string gen_out;
  generate->add_option("--b", gen_b, "leading-coefficient parameter b >= 1");
  generate->add_option("--d", gen_d, "degree parameter d >= 2");
  generate->add_option("--tmax", gen_tmax, "number of blocks");
  generate->add_option("--digit-budget", gen_budget, "max projected digits of the final term");
  generate->add_option("--out", gen_out, "family file to write")->required();

  // validate
  auto* validate = app.add_subcommand("validate", "check C.1-C.5 exactly on a family file");
  std::string val_file, val_json;
  validate->add_option("family", val_file, "family JSON file")->required();
  validate->add_option("--json", val_json, "write the full report as JSON");

  // lemmas
  auto* lemmas = app.add_subcommand("lemmas", "run the estimate verifiers on a family");
  std::string lem_family, lem_suite = "all", lem_out;
  int lem_t = 0;
  LemmaBudget lem_budget;
  lemmas->add_option("--family", lem_family)->required();
  lemmas->add_option("--suite", lem_suite,
                     "integrality|offdiagonal|diagonal|tail|all (default all)");
  lemmas->add_option("--t", lem_t, "restrict to one block (0 = all applicable)");
  lemmas->add_option("--cap", lem_budget.exhaustive_cap, "exhaustive cap on (F,xi) pairs");
  lemmas->add_option("--samples", lem_budget.samples, "sampled pairs above the cap");
  lemmas->add_option("--seed", lem_budget.seed, "sampling seed");
  lemmas->add_option("--out", lem_out, "write all reports as a JSON array");

  // parity
  auto* parity = app.add_subcommand("parity", "exact parity-chain table");
  int par_n = 0;
  std::string par_out;
  parity->add_option("--n", par_n, "number of steps")->required();
  parity->add_option("--out", par_out, "CSV output path (default stdout)");

  // fourier
  auto* fourier = app.add_subcommand("fourier", "one Fourier coefficient of the measure");
  std::string fo_family, fo_k, fo_method = "exact", fo_p, fo_out;
  int fo_trunc = 0;
  bool fo_full = false;
  EnumBudget fo_budget;
  std::uint64_t fo_seed = kDefaultSeed;
  fourier->add_option("--family", fo_family)->required();
  fourier->add_option("--k", fo_k, "decimal frequency or sum spec t=3;+1,-2 / t=3;raw;+1")
      ->required();
  fourier->add_option("--p", fo_p, "polynomial coefficients; frequency becomes p(value of --k)");
  fourier->add_option("--method", fo_method, "exact|mc|parity");
  fourier->add_option("--trunc", fo_trunc, "stage T (default t_max)");
  fourier->add_flag("--full-measure", fo_full, "certify the untruncated measure");
  fourier->add_option("--seed", fo_seed);
  fourier->add_option("--samples", fo_budget.mc_samples);
  fourier->add_option("--cap", fo_budget.enumeration_cap);
  fourier->add_option("--out", fo_out, "JSON output path (default stdout)");

  // correlation
  auto* correlation = app.add_subcommand("correlation", "one correlation certificate");
  std::string co_family, co_n, co_p = "0,1", co_method = "exact", co_out;
  double co_eps = 0.05;
  int co_trunc = 0;
  std::uint64_t co_seed = kDefaultSeed;
  EnumBudget co_budget;
  correlation->add_option("--family", co_family)->required();
  correlation->add_option("--n", co_n, "decimal n or sum spec")->required();
  correlation->add_option("--p", co_p, "polynomial coefficients (ascending)");
  correlation->add_option("--epsilon", co_eps);
  correlation->add_option("--method", co_method, "exact|mc");
  correlation->add_option("--trunc", co_trunc, "stage T (default t_max)");
  correlation->add_option("--seed", co_seed);
  correlation->add_option("--out", co_out, "JSON output path (default stdout)");

  // theorem-a
  auto* theorem = app.add_subcommand("theorem-a",
                                     "correlation certificates for all signed generator sums");
  std::string th_family, th_p = "0,1", th_method = "exact", th_out;
  int th_t = 0, th_trunc = 0;
  double th_eps = 0.05;
  std::uint64_t th_seed = kDefaultSeed;
  EnumBudget th_budget;
  theorem->add_option("--family", th_family)->required();
  theorem->add_option("--p", th_p, "polynomial coefficients (ascending)");
  theorem->add_option("--t", th_t, "generator block")->required();
  theorem->add_option("--epsilon", th_eps)->required();
  theorem->add_option("--method", th_method, "exact|mc");
  theorem->add_option("--trunc", th_trunc, "stage T (default max(2,t))");
  theorem->add_option("--seed", th_seed);
  theorem->add_option("--out", th_out, "CSV output path (default stdout)");

  // rigidity
  auto* rigidity = app.add_subcommand("rigidity", "rho_hat(2 p(n_t)), expected near 1");
  std::string ri_family, ri_p = "0,1", ri_out;
  int ri_t = 0, ri_trunc = 0;
  rigidity->add_option("--family", ri_family)->required();
  rigidity->add_option("--p", ri_p);
  rigidity->add_option("--t", ri_t)->required();
  rigidity->add_option("--trunc", ri_trunc, "stage T (default max(2,t))");
  rigidity->add_option("--out", ri_out, "JSON output path (default stdout)");

  // mixing
  auto* mixing = app.add_subcommand("mixing", "defect table |mu(p(n_t)+m) + mu(m)/2|");
  std::string mi_family, mi_p = "0,1", mi_out;
  int mi_t = 0, mi_trunc = 0, mi_range = 5;
  mixing->add_option("--family", mi_family)->required();
  mixing->add_option("--p", mi_p);
  mixing->add_option("--t", mi_t)->required();
  mixing->add_option("--m-range", mi_range, "check |m| <= range (max 10)");
  mixing->add_option("--trunc", mi_trunc, "stage T (default max(2,t))");
  mixing->add_option("--out", mi_out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  if (generate->parsed()) {
    SequenceFamily fam = construct_family(parse_integer(gen_b), gen_d, gen_tmax,
                                          ConstructOptions{gen_budget});
    ConditionReport rep = validate_family(fam);
    print_condition_report(rep, explain);
    if (!rep.all_pass()) {
      std::cerr << "constructed family failed validation\n";
      return kExitCertificate;
    }
    save_family(fam, gen_out);
    std::cout << "wrote " << gen_out << "\n";
    return kExitOk;
  }

  if (validate->parsed()) {
    SequenceFamily fam = load_family(val_file);
    ConditionReport rep = validate_family(fam);
    print_condition_report(rep, explain);
    if (!val_json.empty()) write_text(val_json, rep.to_json().dump(1) + "\n");
    return rep.all_pass() ? kExitOk : kExitCertificate;
  }

  if (lemmas->parsed()) {
    SequenceFamily fam = load_family(lem_family);
    std::vector<LemmaReport> reports;
    auto want = [&](const std::string& s) { return lem_suite == "all" || lem_suite == s; };
    if (want("integrality")) reports.push_back(verify_integrality(fam));
    if (want("offdiagonal"))
      for (int t = 2; t <= fam.t_max; ++t)
        if (lem_t == 0 || lem_t == t) reports.push_back(verify_offdiagonal(fam, t, lem_budget));
    if (want("diagonal"))
      for (int t = 1; t <= fam.t_max; ++t)
        if (lem_t == 0 || lem_t == t) reports.push_back(verify_diagonal(fam, t, lem_budget));
    if (want("tail"))
      for (int tau = 1; tau <= fam.t_max; ++tau)
        if (lem_t == 0 || lem_t == tau) reports.push_back(verify_tail(fam, tau));
    if (reports.empty()) throw std::invalid_argument("no suite selected");

    bool all_pass = true;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rep : reports) {
      all_pass = all_pass && rep.pass();
      std::cout << rep.lemma << " t=" << rep.t << ": " << (rep.pass() ? "pass" : "FAIL") << " ("
                << rep.instances << " instances, max dist " << to_string(rep.max_dist) << ")";
      if (explain) std::cout << "  [" << lemma_explanation(rep.lemma) << "]";
      std::cout << "\n";
      arr.push_back(rep.to_json());
    }
    if (!lem_out.empty()) write_text(lem_out, arr.dump(1) + "\n");
    return all_pass ? kExitOk : kExitCertificate;
  }

  if (parity->parsed()) {
    if (par_n < 1) throw std::domain_error("parity: --n must be >= 1");
    std::string csv = "N,p_ee,p_eo,p_oe,p_oo,E_exact,E_float\n";
    ParityDistribution p = parity_initial();
    for (int n = 1; n <= par_n; ++n) {
      p = step(p);
      Rational e = p.signed_mass();
      csv += std::to_string(n) + "," + to_string(p.p_ee) + "," + to_string(p.p_eo) + "," +
             to_string(p.p_oe) + "," + to_string(p.p_oo) + "," + to_string(e) + "," +
             fmt_double(to_float(e)) + "\n";
    }
    write_text(par_out, csv);
    return kExitOk;
  }

  if (fourier->parsed()) {
    SequenceFamily fam = load_family(fo_family);
    std::optional<IntPolynomial> poly;
    if (!fo_p.empty()) poly = IntPolynomial::parse(fo_p);
    FrequencyArg freq = resolve_frequency(fam, fo_k, poly);
    Method method = parse_method(fo_method);
    int trunc = fo_trunc == 0 ? fam.t_max : fo_trunc;

    FourierEstimate est;
    if (method == Method::parity_approx) {
      if (!freq.spec || !poly)
        throw std::invalid_argument("--method parity needs a sum spec in --k and --p");
      est = parity_approx(fam, *poly, freq.spec->t, freq.spec->raw_term_count);
    } else {
      TruncatedMeasureSpec spec{fam, trunc};
      est = mu_hat(spec, freq.value, method, fo_full, fo_budget, fo_seed);
    }
    nlohmann::json j = est.to_json();
    j["k"] = freq.value.get_str();
    write_text(fo_out, j.dump(1) + "\n");
    return kExitOk;
  }

  if (correlation->parsed()) {
    SequenceFamily fam = load_family(co_family);
    IntPolynomial poly = IntPolynomial::parse(co_p);
    FrequencyArg freq = resolve_frequency(fam, co_n, std::nullopt);
    int trunc = co_trunc == 0 ? fam.t_max : co_trunc;
    TruncatedMeasureSpec spec{fam, trunc};
    CorrelationReport rep =
        correlation_report(spec, poly, freq.base, co_eps, parse_method(co_method), co_budget,
                           co_seed);
    write_text(co_out, correlation_to_json(rep).dump(1) + "\n");
    return rep.passes_quarter ? kExitOk : kExitCertificate;
  }

  if (theorem->parsed()) {
    SequenceFamily fam = load_family(th_family);
    IntPolynomial poly = IntPolynomial::parse(th_p);
    TheoremAReport rep = theorem_a_report(fam, poly, th_t, th_eps, parse_method(th_method),
                                          th_trunc, th_budget, th_seed);
    std::string csv = correlation_csv_header();
    for (const auto& row : rep.rows) csv += correlation_csv_row(row);
    write_text(th_out, csv);
    std::cerr << "rows=" << rep.rows.size() << " max_Q_high=" << fmt_double(rep.max_q_high)
              << " margin=" << fmt_double(rep.margin)
              << " all_pass_quarter=" << (rep.all_pass_quarter ? "true" : "false") << "\n";
    return rep.all_pass_quarter ? kExitOk : kExitCertificate;
  }

  if (rigidity->parsed()) {
    SequenceFamily fam = load_family(ri_family);
    IntPolynomial poly = IntPolynomial::parse(ri_p);
    int trunc = ri_trunc == 0 ? std::max(2, ri_t) : ri_trunc;
    TruncatedMeasureSpec spec{fam, trunc};
    FourierEstimate est = rigidity_diagnostic(spec, poly, ri_t);
    nlohmann::json j = est.to_json();
    j["t"] = ri_t;
    j["lower"] = est.re - est.radius;
    write_text(ri_out, j.dump(1) + "\n");
    return kExitOk;
  }

  if (mixing->parsed()) {
    SequenceFamily fam = load_family(mi_family);
    IntPolynomial poly = IntPolynomial::parse(mi_p);
    int trunc = mi_trunc == 0 ? std::max(2, mi_t) : mi_trunc;
    TruncatedMeasureSpec spec{fam, trunc};
    auto rows = weak_mixing_diagnostic(spec, poly, mi_t, mi_range);
    std::string csv = "m,shifted_re,shifted_im,base_re,base_im,defect,combined_radius\n";
    for (const auto& row : rows)
      csv += std::to_string(row.shift) + "," + fmt_double(row.shifted.re) + "," +
             fmt_double(row.shifted.im) + "," + fmt_double(row.base.re) + "," +
             fmt_double(row.base.im) + "," + fmt_double(row.defect) + "," +
             fmt_double(row.combined_radius) + "\n";
    write_text(mi_out, csv);
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const FamilyFormatError& e) {
    std::cerr << "family file error: " << e.what() << "\n";
    return kExitFamilyFile;
  } catch (const ResourceError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::out_of_range& e) {
    std::cerr << "out of range: " << e.what() << "\n";
    return kExitRange;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitRange;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
