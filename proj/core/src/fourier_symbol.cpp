#include "hagerlab/fourier_symbol.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

namespace hagerlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_to_2pi(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

}  // namespace

FourierSymbol::FourierSymbol(std::map<int, Complex> coeffs) : coeffs_(std::move(coeffs)) {
  for (const auto& [m, c] : coeffs_) order_ = std::max(order_, std::abs(m));
  flat_.assign(2 * order_ + 1, Complex(0.0, 0.0));
  for (const auto& [m, c] : coeffs_) flat_[m + order_] = c;
  mean_ = flat_[order_];
  scan_critical_points();
}

void FourierSymbol::scan_critical_points() {
  // Bracket the critical points of Im g from a uniform grid scan of Im g'.
  std::vector<std::pair<double, double>> brackets;
  const double step = kTwoPi / kScanGrid;
  double x_prev = 0.0;
  double v_prev = im_dg(x_prev);
  if (v_prev == 0.0) v_prev = im_dg(x_prev + 0.5 * step);
  for (int i = 1; i <= kScanGrid; ++i) {
    const double x = i * step;
    double v = im_dg(x);
    if (v == 0.0) v = im_dg(x + 0.5 * step);
    if (v_prev * v < 0.0) brackets.emplace_back(x_prev, x);
    x_prev = x;
    v_prev = v;
  }
  if (brackets.size() > 2) {
    defect_ = ErrorCode::MultipleCritical;
    defect_message_ = "Im g' changes sign " + std::to_string(brackets.size()) + " times";
    return;
  }
  if (brackets.size() < 2) {
    defect_ = ErrorCode::DegenerateStrip;
    defect_message_ = "Im g has no interior minimum/maximum pair";
    return;
  }

  double roots[2];
  for (int k = 0; k < 2; ++k) {
    auto [lo, hi] = brackets[k];
    double flo = im_dg(lo);
    while (hi - lo > kBisectWidth) {
      const double mid = 0.5 * (lo + hi);
      const double fmid = im_dg(mid);
      if (flo * fmid <= 0.0) {
        hi = mid;
      } else {
        lo = mid;
        flo = fmid;
      }
    }
    roots[k] = wrap_to_2pi(0.5 * (lo + hi));
  }
  if (im_g(roots[0]) < im_g(roots[1])) {
    crit_min_ = roots[0];
    crit_max_ = roots[1];
  } else {
    crit_min_ = roots[1];
    crit_max_ = roots[0];
  }
  im_min_ = im_g(crit_min_);
  im_max_ = im_g(crit_max_);
  if (!(im_min_ < im_max_)) {
    defect_ = ErrorCode::DegenerateStrip;
    defect_message_ = "strip has zero height";
  }
}

FourierSymbol FourierSymbol::from_triples(
    const std::vector<std::tuple<int, double, double>>& triples) {
  std::map<int, Complex> coeffs;
  for (const auto& [m, re, im] : triples) coeffs[m] += Complex(re, im);
  return FourierSymbol(std::move(coeffs));
}

Complex FourierSymbol::eval(double x, int order) const {
  assert(order >= 0 && order <= 2);
  Complex sum(0.0, 0.0);
  for (int m = -order_; m <= order_; ++m) {
    const Complex& c = flat_[m + order_];
    if (c == Complex(0.0, 0.0)) continue;
    Complex factor(1.0, 0.0);
    for (int k = 0; k < order; ++k) factor *= Complex(0.0, m);
    sum += c * factor * std::polar(1.0, m * x);
  }
  return sum;
}

Complex FourierSymbol::antiderivative(double x) const {
  Complex sum = flat_[order_] * x;
  for (int m = -order_; m <= order_; ++m) {
    if (m == 0) continue;
    const Complex& c = flat_[m + order_];
    if (c == Complex(0.0, 0.0)) continue;
    sum += c * std::polar(1.0, m * x) / Complex(0.0, m);
  }
  return sum;
}

double FourierSymbol::im_g(double x) const { return eval(x, 0).imag(); }
double FourierSymbol::im_dg(double x) const { return eval(x, 1).imag(); }

bool FourierSymbol::inside_strip(double y) const {
  ensure_valid();
  return y >= im_min_ + kStripMargin && y <= im_max_ - kStripMargin;
}

double FourierSymbol::bisect_im_g(double lo, double hi, double target) const {
  double flo = im_g(lo) - target;
  while (hi - lo > kBisectWidth) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = im_g(mid) - target;
    if (flo * fmid <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fmid;
    }
  }
  return 0.5 * (lo + hi);
}

TurningPair FourierSymbol::turning_points(Complex z) const {
  const double y = z.imag();
  if (!inside_strip(y))
    throw Error(ErrorCode::OutOfStrip,
                "Im z = " + std::to_string(y) + " not strictly inside the strip");

  // Im g is strictly monotone between consecutive critical points: the
  // decreasing branch runs from b up to a (+2*pi), the increasing one from
  // a up to b (+2*pi).
  const double dec_hi = crit_min_ > crit_max_ ? crit_min_ : crit_min_ + kTwoPi;
  const double inc_hi = crit_max_ > crit_min_ ? crit_max_ : crit_max_ + kTwoPi;
  const double x_plus_raw = bisect_im_g(crit_max_, dec_hi, y);
  const double x_minus_raw = bisect_im_g(crit_min_, inc_hi, y);

  const double x_minus = wrap_to_2pi(x_minus_raw);
  double x_plus = wrap_to_2pi(x_plus_raw);
  if (x_plus >= x_minus) x_plus -= kTwoPi;

  TurningPair tp;
  tp.x_plus = x_plus;
  tp.x_minus = x_minus;
  tp.xi_plus = z.real() - eval(x_plus).real();
  tp.xi_minus = z.real() - eval(x_minus).real();
  return tp;
}

double FourierSymbol::turning_gap(double y) const {
  const TurningPair tp = turning_points(Complex(0.0, y));
  return tp.x_minus - tp.x_plus;
}

ActionSample FourierSymbol::action(double y) const {
  const TurningPair tp = turning_points(Complex(0.0, y));
  const double gap = tp.x_minus - tp.x_plus;

  // Branch integrals Im int (z - g) via the closed-form antiderivative.
  const Complex g_plus = antiderivative(tp.x_plus);
  const double branch_lower =
      y * gap - (antiderivative(tp.x_minus) - g_plus).imag();
  const double branch_upper =
      y * (gap - kTwoPi) - (antiderivative(tp.x_minus - kTwoPi) - g_plus).imag();

  ActionSample out;
  out.y = y;
  out.s = std::min(branch_lower, branch_upper);
  out.ds = y <= im_mean() ? gap : gap - kTwoPi;
  out.d2s = 1.0 / eval(tp.x_minus, 1).imag() - 1.0 / eval(tp.x_plus, 1).imag();
  return out;
}

double FourierSymbol::bracket_factor(double y) const {
  const TurningPair tp = turning_points(Complex(0.0, y));
  return -eval(tp.x_plus, 1).imag() * eval(tp.x_minus, 1).imag();
}

double FourierSymbol::boundary_distance(Complex z) const {
  ensure_valid();
  return std::min(z.imag() - im_min_, im_max_ - z.imag());
}

}  // namespace hagerlab
