#pragma once

// Integer polynomials p(x) = b_d x^d + ... + b_1 x with p(0) = 0 and
// degree d > 1. Coefficients are stored ascending: coeff(c) = b_c.

#include <polyrec/rational.hpp>

#include <sstream>
#include <vector>

namespace polyrec {

class IntPolynomial {
 public:
  // ascending coefficients b_1..b_d; requires d > 1 and b_d != 0.
  explicit IntPolynomial(std::vector<Integer> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 2)
      throw std::domain_error("IntPolynomial: degree must exceed 1");
    if (coeffs_.back() == 0)
      throw std::domain_error("IntPolynomial: leading coefficient is zero");
  }

  // Comma-separated ascending decimal coefficients, e.g. "0,1" for x^2.
  static IntPolynomial parse(const std::string& csv) {
    std::vector<Integer> coeffs;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) coeffs.push_back(parse_integer(item));
    return IntPolynomial(std::move(coeffs));
  }

  int degree() const { return static_cast<int>(coeffs_.size()); }

  // b_c for 1 <= c <= d
  const Integer& coeff(int c) const { return coeffs_.at(static_cast<std::size_t>(c) - 1); }

  Integer evaluate(const Integer& n) const {
    Integer acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * n + *it;
    return acc * n;
  }

  // b = |b_d|
  Integer leading_abs() const { return abs(coeffs_.back()); }

  Integer coeff_abs_sum() const {
    Integer s = 0;
    for (const auto& c : coeffs_) s += abs(c);
    return s;
  }

  std::string to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
      if (i) out += ',';
      out += coeffs_[i].get_str();
    }
    return out;
  }

 private:
  std::vector<Integer> coeffs_;
};

}  // namespace polyrec
