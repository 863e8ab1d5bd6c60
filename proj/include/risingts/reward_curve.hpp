#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace risingts {

using Rational = boost::rational<std::int64_t>;

/// Converts a double to the rational it represents. Short decimal-looking
/// values (0.125, 1/6 printed with 17 digits) come back as small fractions;
/// anything else falls back to the exact dyadic value.
/// Throws std::invalid_argument when neither fits in 64-bit terms.
Rational to_rational(double x);

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// Expected reward of an arm as a function of its own pull count n >= 1.
///
/// Parameters are validated at construction; evaluation never throws for n >= 1.
class RewardCurve {
 public:
  /// c (1 - exp(-a n)), with a, c in (0, 1].
  struct Exponential {
    double c;
    double a;
  };
  /// c (1 - b (n + b^{1/rho})^{-rho}), with c, rho in (0, 1] and b >= 0.
  struct Polynomial {
    double c;
    double b;
    double rho;
  };
  /// min(cap, max(0, slope (n - offset))). Stored exactly.
  struct LinearCapped {
    Rational slope;
    Rational cap;
    Rational offset;
  };
  struct Constant {
    double value;
  };
  /// values[n - 1]; the last value extends to every n past the table.
  struct Tabulated {
    std::vector<double> values;
  };

  using Family = std::variant<Exponential, Polynomial, LinearCapped, Constant, Tabulated>;

  static RewardCurve exponential(double c, double a);
  static RewardCurve polynomial(double c, double b, double rho);
  static RewardCurve linear_capped(Rational slope, Rational cap, Rational offset);
  static RewardCurve constant(double value);
  static RewardCurve tabulated(std::vector<double> values);

  /// mu(n). Requires n >= 1.
  double operator()(std::uint64_t n) const;

  /// Exact mu(n) for LinearCapped curves; throws std::logic_error otherwise.
  Rational exact(std::uint64_t n) const;
  bool has_exact_form() const { return std::holds_alternative<LinearCapped>(family_); }

  const Family& family() const { return family_; }
  std::string_view family_name() const;

  friend bool operator==(const RewardCurve& a, const RewardCurve& b);

 private:
  explicit RewardCurve(Family family);

  Family family_;
  double poly_shift_ = 0.0;  // b^{1/rho}, cached for Polynomial
};

bool operator==(const RewardCurve::Exponential& a, const RewardCurve::Exponential& b);
bool operator==(const RewardCurve::Polynomial& a, const RewardCurve::Polynomial& b);
bool operator==(const RewardCurve::LinearCapped& a, const RewardCurve::LinearCapped& b);
bool operator==(const RewardCurve::Constant& a, const RewardCurve::Constant& b);
bool operator==(const RewardCurve::Tabulated& a, const RewardCurve::Tabulated& b);

inline double eval_mu(const RewardCurve& curve, std::uint64_t n) { return curve(n); }

}  // namespace risingts
