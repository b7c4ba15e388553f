#include "hagerlab/theory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace hagerlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

// Natural log of delta from the regime parameters; safe where delta itself
// would underflow.
double log_delta(const ModelParams& p) { return 0.5 * std::log(p.h) - p.epsilon0 / p.h; }

double require_inside(const FourierSymbol& symbol, double y) {
  if (!symbol.inside_strip(y))
    throw Error(ErrorCode::OutOfStrip, "Im z = " + std::to_string(y) + " outside the strip");
  return y;
}

// Smooth bump psi(t) = exp(-1/(t(1-t))) / Z on (0,1), Z chosen so that the
// integral is 1, with its cumulative Psi tabulated once (Hermite-interpolated).
double bump_raw(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return std::exp(-1.0 / (t * (1.0 - t)));
}

struct BumpTable {
  static constexpr int kCells = 8192;
  std::array<double, kCells + 1> cum{};
  double z = 0.0;

  BumpTable() {
    const double dt = 1.0 / kCells;
    cum[0] = 0.0;
    for (int i = 0; i < kCells; ++i) {
      const double a = i * dt;
      cum[i + 1] = cum[i] + dt / 6.0 *
                               (bump_raw(a) + 4.0 * bump_raw(a + 0.5 * dt) + bump_raw(a + dt));
    }
    z = cum[kCells];
  }
};

const BumpTable& bump_table() {
  static const BumpTable table;
  return table;
}

double bump(double t) { return bump_raw(t) / bump_table().z; }

// Cumulative of the bump: 0 for t <= 0, 1 for t >= 1.
double bump_cumulative(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const BumpTable& tab = bump_table();
  const double dt = 1.0 / BumpTable::kCells;
  const double u = t * BumpTable::kCells;
  const int i = std::min(static_cast<int>(u), BumpTable::kCells - 1);
  const double s = u - i;
  const double f0 = tab.cum[i], f1 = tab.cum[i + 1];
  const double d0 = dt * bump_raw(i * dt), d1 = dt * bump_raw((i + 1) * dt);
  // Cubic Hermite on the cell.
  const double s2 = s * s, s3 = s2 * s;
  const double value = (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * d0 +
                       (-2 * s3 + 3 * s2) * f1 + (s3 - s2) * d1;
  return value / tab.z;
}

}  // namespace

double epsilon0_from_delta(double h, double delta) {
  if (!(h > 0.0) || !(delta > 0.0))
    throw Error(ErrorCode::RegimeViolation, "h and delta must be positive");
  return -h * std::log(delta / std::sqrt(h));
}

ModelParams ModelParams::from_delta(double h, double delta, std::optional<double> s_max) {
  ModelParams p{h, delta, epsilon0_from_delta(h, delta)};
  if (s_max && p.epsilon0 >= *s_max)
    throw Error(ErrorCode::RegimeViolation,
                "epsilon0 = " + std::to_string(p.epsilon0) + " >= S(<Im g>) = " +
                    std::to_string(*s_max));
  return p;
}

ModelParams ModelParams::from_epsilon0(double h, double epsilon0,
                                       std::optional<double> s_max) {
  if (!(h > 0.0)) throw Error(ErrorCode::RegimeViolation, "h must be positive");
  if (s_max && epsilon0 >= *s_max)
    throw Error(ErrorCode::RegimeViolation,
                "epsilon0 = " + std::to_string(epsilon0) + " >= S(<Im g>) = " +
                    std::to_string(*s_max));
  const double delta = std::sqrt(h) * std::exp(-epsilon0 / h);
  if (!(delta > 0.0))
    throw Error(ErrorCode::RegimeViolation, "delta underflows double precision");
  return ModelParams{h, delta, epsilon0};
}

PhiFactor phi_factor(const FourierSymbol& symbol, const ModelParams& params, Complex z) {
  const double h = params.h;
  const double dy = z.imag() - symbol.im_mean();
  const double dre = z.real() - symbol.mean().real();

  PhiFactor out;
  out.re_phi = -kTwoPi / h * std::abs(dy);
  const double sign = dy <= 0.0 ? -1.0 : 1.0;  // lower branch on the mean line
  out.im_phi = sign * kTwoPi / h * dre;

  // |1 - e^Phi| from the phase reduced mod 2*pi, so that points of the
  // unperturbed spectrum <g> + hZ come out as exact zeros.
  const double turns = dre / h;
  const double frac = turns - std::nearbyint(turns);
  const double phase = sign * kTwoPi * frac;
  const double mag = out.re_phi < -745.0 ? 0.0 : std::exp(out.re_phi);
  if (mag == 1.0) {
    out.abs_one_minus_exp = 2.0 * std::abs(std::sin(0.5 * phase));
  } else {
    const double re = 1.0 - mag * std::cos(phase);
    const double im = mag * std::sin(phase);
    out.abs_one_minus_exp = std::hypot(re, im);
  }
  return out;
}

double log_t0(const FourierSymbol& symbol, const ModelParams& params, Complex z) {
  require_inside(symbol, z.imag());
  const PhiFactor phi = phi_factor(symbol, params, z);
  if (phi.abs_one_minus_exp == 0.0)
    throw Error(ErrorCode::OnSpectrum, "z lies on the unperturbed spectrum");
  const ActionSample act = symbol.action(z.imag());
  const double w = symbol.bracket_factor(z.imag());
  return 0.5 * std::log(params.h) + 0.25 * std::log(w) + std::log(phi.abs_one_minus_exp) -
         act.s / params.h - 0.5 * std::log(kPi);
}

DensityValue density_components(const FourierSymbol& symbol, const ModelParams& params,
                                Complex z, bool phi_corrections) {
  require_inside(symbol, z.imag());
  const double h = params.h;
  const ActionSample act = symbol.action(z.imag());
  const double w = symbol.bracket_factor(z.imag());
  const double abs_ds = std::abs(act.ds);
  const double ld = log_delta(params);

  DensityValue out;
  out.psi1 = act.d2s / (2.0 * h);
  out.log_psi2 = 0.5 * std::log(w) - std::log(kPi) - std::log(h) - 2.0 * ld -
                 2.0 * act.s / h + 2.0 * std::log(abs_ds);
  out.log_theta =
      std::log(h) + 0.5 * std::log(w) - std::log(kPi) - 2.0 * ld - 2.0 * act.s / h;

  if (phi_corrections) {
    const PhiFactor phi = phi_factor(symbol, params, z);
    const double mag = phi.re_phi < -745.0 ? 0.0 : std::exp(phi.re_phi);
    out.log_psi2 += 2.0 * std::log1p((kTwoPi - abs_ds) / abs_ds * mag);
    out.log_theta += 2.0 * std::log(phi.abs_one_minus_exp);
  }

  out.theta = std::exp(out.log_theta);
  if (out.theta > 700.0) {
    out.density = 0.0;
  } else {
    const double psi2 = out.log_psi2 < -700.0 ? 0.0 : std::exp(out.log_psi2);
    out.density = (out.psi1 + psi2) * std::exp(-out.theta) / kPi;
  }
  return out;
}

double weyl_count(const FourierSymbol& symbol, const ModelParams& params, const Box& box) {
  if (box.im1 == box.im0) return 0.0;
  require_inside(symbol, box.im0);
  require_inside(symbol, box.im1);
  const double gap_hi = symbol.turning_gap(box.im1);
  const double gap_lo = symbol.turning_gap(box.im0);
  return box.width() / (kTwoPi * params.h) * (gap_hi - gap_lo);
}

namespace {

// Bisection of f on [lo, hi] assuming a sign change; stops once |f| <= tol
// or the bracket is at floating-point resolution.
template <class F>
double bisect_to_residual(F f, double lo, double hi, double flo, double tol) {
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm) <= tol || hi - lo < 4e-16 * (1.0 + std::abs(mid))) return mid;
    if (flo * fm <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return mid;
}

}  // namespace

std::pair<double, double> y_levels(const FourierSymbol& symbol, const ModelParams& params) {
  const double s_max = symbol.action(symbol.im_mean()).s;
  if (!(params.epsilon0 > 0.0) || params.epsilon0 >= s_max)
    throw Error(ErrorCode::RegimeViolation,
                "epsilon0 must lie in (0, S(<Im g>)) = (0, " + std::to_string(s_max) + ")");

  const double margin = FourierSymbol::kStripMargin;
  auto f = [&](double y) { return symbol.action(y).s - params.epsilon0; };

  const double lo1 = symbol.im_min() + margin, hi1 = symbol.im_mean();
  const double y_minus = bisect_to_residual(f, lo1, hi1, f(lo1), 1e-12);
  const double lo2 = symbol.im_mean(), hi2 = symbol.im_max() - margin;
  const double y_plus = bisect_to_residual(f, lo2, hi2, f(lo2), 1e-12);
  return {y_minus, y_plus};
}

double gamma_im(const FourierSymbol& symbol, const ModelParams& params, double re_z,
                Side side) {
  const double margin = FourierSymbol::kStripMargin;
  const double line_gap = 1e-6;  // stay off the mean line where Phi oscillates
  const double target = log_delta(params);
  auto f = [&](double y) { return log_t0(symbol, params, Complex(re_z, y)) - target; };

  double lo, hi;
  if (side == Side::minus) {
    lo = symbol.im_min() + margin;
    hi = symbol.im_mean() - line_gap;
  } else {
    lo = symbol.im_mean() + line_gap;
    hi = symbol.im_max() - margin;
  }
  const double flo = f(lo), fhi = f(hi);
  if (flo * fhi > 0.0)
    throw Error(ErrorCode::NoRoot, "predicted log t0 does not cross ln delta on this side");
  return bisect_to_residual(f, lo, hi, flo, 1e-10);
}

double Gamma_im(const FourierSymbol& symbol, const ModelParams& params, double re_z,
                Side side) {
  const auto [y_minus, y_plus] = y_levels(symbol, params);
  const double y_level = side == Side::minus ? y_minus : y_plus;
  const double halfwidth = 10.0 * params.h / std::cbrt(params.epsilon0);

  const double margin = FourierSymbol::kStripMargin;
  const double line_gap = 1e-6;
  double lo = y_level - halfwidth, hi = y_level + halfwidth;
  if (side == Side::minus) {
    lo = std::max(lo, symbol.im_min() + margin);
    hi = std::min(hi, symbol.im_mean() - line_gap);
  } else {
    lo = std::max(lo, symbol.im_mean() + line_gap);
    hi = std::min(hi, symbol.im_max() - margin);
  }

  auto f = [&](double y) {
    return density_components(symbol, params, Complex(re_z, y)).density;
  };

  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > 1e-10) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  const double best = 0.5 * (a + b);
  const double fbest = f(best);
  if (f(lo) >= fbest || f(hi) >= fbest)
    throw Error(ErrorCode::NoInteriorMax, "density maximum sits at a bracket endpoint");
  return best;
}

double tunneling_overlap_prediction(const FourierSymbol& symbol, const ModelParams& params,
                                    Complex z) {
  require_inside(symbol, z.imag());
  if (std::abs(z.imag() - symbol.im_mean()) <= 0.05)
    throw Error(ErrorCode::TooCloseToLine,
                "tunneling formula not valid within 0.05 of the mean line");
  const ActionSample act = symbol.action(z.imag());
  const double w = symbol.bracket_factor(z.imag());
  return 0.25 * std::log(w) - 0.5 * std::log(kPi * params.h) + std::log(std::abs(act.ds)) -
         act.s / params.h;
}

WkbSample wkb_sample(const FourierSymbol& symbol, const ModelParams& params, Complex z,
                     int grid_size) {
  const double h = params.h;
  if (symbol.boundary_distance(z) < std::pow(h, 2.0 / 3.0))
    throw Error(ErrorCode::TooCloseToBoundary, "WKB construction requires d(z) >= h^(2/3)");
  const TurningPair tp = symbol.turning_points(z);
  const double sqrt_h = std::sqrt(h);
  const double x_lo = tp.x_minus - kTwoPi;

  WkbSample out;
  out.x0 = x_lo;
  out.dx = kTwoPi / grid_size;
  out.e_wkb.resize(grid_size);
  out.f_wkb.resize(grid_size);

  const Complex g_at_plus = symbol.antiderivative(tp.x_plus);
  const Complex g_at_minus = symbol.antiderivative(tp.x_minus);

  std::vector<double> chi_e_deriv(grid_size);
  for (int k = 0; k < grid_size; ++k) {
    const double x = x_lo + k * out.dx;

    const double chi_e = bump_cumulative((x - x_lo) / sqrt_h) - 1.0 +
                         bump_cumulative((tp.x_minus - x) / sqrt_h);
    chi_e_deriv[k] =
        (bump((x - x_lo) / sqrt_h) - bump((tp.x_minus - x) / sqrt_h)) / sqrt_h;

    const Complex phi_plus = z * (x - tp.x_plus) - (symbol.antiderivative(x) - g_at_plus);
    out.e_wkb[k] = chi_e * std::exp(Complex(0.0, 1.0) * phi_plus / h);

    // f lives on ]x_plus, x_plus + 2*pi[; lift grid points below x_plus by a
    // period before applying the cutoff and the phase from x_minus.
    const double xf = x >= tp.x_plus ? x : x + kTwoPi;
    const double chi_f = bump_cumulative((xf - tp.x_plus) / sqrt_h) - 1.0 +
                         bump_cumulative((tp.x_plus + kTwoPi - xf) / sqrt_h);
    const Complex phi_minus = std::conj(z) * (xf - tp.x_minus) -
                              std::conj(symbol.antiderivative(xf) - g_at_minus);
    out.f_wkb[k] = chi_f * std::exp(Complex(0.0, 1.0) * phi_minus / h);
  }

  // Both quasimodes vanish at the interval ends, so the trapezoid rule
  // reduces to a plain Riemann sum.
  double norm_e2 = 0.0, norm_f2 = 0.0;
  for (int k = 0; k < grid_size; ++k) {
    norm_e2 += std::norm(out.e_wkb[k]);
    norm_f2 += std::norm(out.f_wkb[k]);
  }
  const double inv_ne = 1.0 / std::sqrt(norm_e2 * out.dx);
  const double inv_nf = 1.0 / std::sqrt(norm_f2 * out.dx);
  for (int k = 0; k < grid_size; ++k) {
    out.e_wkb[k] *= inv_ne;
    out.f_wkb[k] *= inv_nf;
  }
  double resid2 = 0.0;
  for (int k = 0; k < grid_size; ++k) {
    const double x = x_lo + k * out.dx;
    const Complex phi_plus = z * (x - tp.x_plus) - (symbol.antiderivative(x) - g_at_plus);
    const Complex r = Complex(0.0, -h) * chi_e_deriv[k] * inv_ne *
                      std::exp(Complex(0.0, 1.0) * phi_plus / h);
    resid2 += std::norm(r);
  }
  out.residual_bound = std::sqrt(resid2 * out.dx);
  return out;
}

std::vector<TheoryRow> theory_profile(const FourierSymbol& symbol, const ModelParams& params,
                                      double im0, double im1, int points,
                                      bool phi_corrections) {
  std::vector<TheoryRow> rows;
  rows.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double y = points == 1 ? im0 : im0 + (im1 - im0) * i / (points - 1);
    const ActionSample act = symbol.action(y);
    const DensityValue dv =
        density_components(symbol, params, Complex(0.0, y), phi_corrections);
    rows.push_back(TheoryRow{y, act.s, act.ds, symbol.bracket_factor(y), dv.psi1,
                             dv.log_psi2, dv.log_theta, dv.density});
  }
  return rows;
}

}  // namespace hagerlab
