#include "risingts/reward_curve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace risingts {

namespace {

constexpr std::int64_t kMaxConvergentDenominator = std::int64_t{1} << 31;

std::optional<Rational> dyadic(double x) {
  if (x == 0.0) return Rational(0);
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);  // x = mantissa * 2^exponent
  auto m = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  int shift = exponent - 53;
  while (shift < 0 && (m & 1) == 0) {
    m /= 2;
    ++shift;
  }
  if (shift >= 0) {
    if (shift > 62 - static_cast<int>(std::bit_width(static_cast<std::uint64_t>(m < 0 ? -m : m)))) return std::nullopt;
    return Rational(m * (std::int64_t{1} << shift));
  }
  if (-shift > 62) return std::nullopt;
  return Rational(m, std::int64_t{1} << -shift);
}

}  // namespace

Rational to_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("to_rational: non-finite value");

  // Continued-fraction convergents h/k of x; accept the first that rounds back to x.
  const bool negative = x < 0.0;
  double rest = std::fabs(x);
  if (rest >= 0x1p52) {
    if (auto exact = dyadic(x)) return *exact;
    throw std::invalid_argument("to_rational: value too large");
  }
  std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(rest));
  std::int64_t k_prev = 0, k = 1;
  double frac = rest - std::floor(rest);
  for (int iter = 0; iter < 64; ++iter) {
    if (static_cast<double>(h) / static_cast<double>(k) == std::fabs(x)) {
      return Rational(negative ? -h : h, k);
    }
    if (frac == 0.0) break;
    rest = 1.0 / frac;
    const double a_real = std::floor(rest);
    frac = rest - a_real;
    if (a_real > 1e12) break;
    const auto a = static_cast<std::int64_t>(a_real);
    const std::int64_t h_next = a * h + h_prev;
    const std::int64_t k_next = a * k + k_prev;
    if (k_next > kMaxConvergentDenominator || h_next > (std::int64_t{1} << 52)) break;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  if (auto exact = dyadic(x)) return *exact;
  throw std::invalid_argument("to_rational: value " + std::to_string(x) + " has no 64-bit rational form");
}

RewardCurve::RewardCurve(Family family) : family_(std::move(family)) {
  if (const auto* p = std::get_if<Polynomial>(&family_)) {
    poly_shift_ = p->b > 0.0 ? std::pow(p->b, 1.0 / p->rho) : 0.0;
  }
}

RewardCurve RewardCurve::exponential(double c, double a) {
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("exponential curve: c must lie in (0, 1]");
  if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("exponential curve: a must lie in (0, 1]");
  return RewardCurve(Exponential{c, a});
}

RewardCurve RewardCurve::polynomial(double c, double b, double rho) {
  if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("polynomial curve: c must lie in (0, 1]");
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("polynomial curve: rho must lie in (0, 1]");
  if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("polynomial curve: b must be >= 0");
  return RewardCurve(Polynomial{c, b, rho});
}

RewardCurve RewardCurve::linear_capped(Rational slope, Rational cap, Rational offset) {
  if (slope < 0) throw std::invalid_argument("linear-capped curve: slope must be >= 0");
  if (cap < 0) throw std::invalid_argument("linear-capped curve: cap must be >= 0");
  return RewardCurve(LinearCapped{slope, cap, offset});
}

RewardCurve RewardCurve::constant(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("constant curve: value must be finite");
  return RewardCurve(Constant{value});
}

RewardCurve RewardCurve::tabulated(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("tabulated curve: table is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw std::invalid_argument("tabulated curve: non-finite entry");
    if (i > 0 && values[i] < values[i - 1]) {
      throw std::invalid_argument("tabulated curve: decreasing at index " + std::to_string(i));
    }
  }
  return RewardCurve(Tabulated{std::move(values)});
}

double RewardCurve::operator()(std::uint64_t n) const {
  if (n == 0) throw std::invalid_argument("reward curve: pull index starts at 1");
  const auto nd = static_cast<double>(n);
  struct Visitor {
    double nd;
    std::uint64_t n;
    double shift;
    double operator()(const Exponential& f) const { return -f.c * std::expm1(-f.a * nd); }
    double operator()(const Polynomial& f) const {
      if (f.b == 0.0) return f.c;
      return f.c * (1.0 - f.b * std::pow(nd + shift, -f.rho));
    }
    double operator()(const LinearCapped& f) const {
      const double raw = to_double(f.slope) * (nd - to_double(f.offset));
      return std::min(to_double(f.cap), std::max(0.0, raw));
    }
    double operator()(const Constant& f) const { return f.value; }
    double operator()(const Tabulated& f) const {
      return n <= f.values.size() ? f.values[n - 1] : f.values.back();
    }
  };
  return std::visit(Visitor{nd, n, poly_shift_}, family_);
}

Rational RewardCurve::exact(std::uint64_t n) const {
  if (n == 0) throw std::invalid_argument("reward curve: pull index starts at 1");
  const auto* f = std::get_if<LinearCapped>(&family_);
  if (f == nullptr) throw std::logic_error("reward curve: exact values need a linear-capped curve");
  const Rational raw = f->slope * (Rational(static_cast<std::int64_t>(n)) - f->offset);
  return std::min(f->cap, std::max(Rational(0), raw));
}

std::string_view RewardCurve::family_name() const {
  struct Visitor {
    std::string_view operator()(const Exponential&) const { return "exponential"; }
    std::string_view operator()(const Polynomial&) const { return "polynomial"; }
    std::string_view operator()(const LinearCapped&) const { return "linear_capped"; }
    std::string_view operator()(const Constant&) const { return "constant"; }
    std::string_view operator()(const Tabulated&) const { return "tabulated"; }
  };
  return std::visit(Visitor{}, family_);
}

bool operator==(const RewardCurve::Exponential& a, const RewardCurve::Exponential& b) {
  return a.c == b.c && a.a == b.a;
}
bool operator==(const RewardCurve::Polynomial& a, const RewardCurve::Polynomial& b) {
  return a.c == b.c && a.b == b.b && a.rho == b.rho;
}
bool operator==(const RewardCurve::LinearCapped& a, const RewardCurve::LinearCapped& b) {
  return a.slope == b.slope && a.cap == b.cap && a.offset == b.offset;
}
bool operator==(const RewardCurve::Constant& a, const RewardCurve::Constant& b) { return a.value == b.value; }
bool operator==(const RewardCurve::Tabulated& a, const RewardCurve::Tabulated& b) {
  return a.values == b.values;
}
bool operator==(const RewardCurve& a, const RewardCurve& b) { return a.family_ == b.family_; }

}  // namespace risingts
