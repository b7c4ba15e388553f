#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hagerlab/errors.hpp"

namespace hagerlab {

using Complex = std::complex<double>;

/// Solutions x of Im g(x) = Im z with the sign convention
/// Im g'(x_plus) < 0 < Im g'(x_minus) and representatives chosen so that
/// x_minus - 2*pi < x_plus < x_minus.
struct TurningPair {
  double x_plus;
  double x_minus;
  double xi_plus;
  double xi_minus;
};

/// Action S at height y = Im z together with its first two derivatives in
/// Im z. `ds` follows the lower-branch convention at y exactly on the mean
/// line: ds = x_minus - x_plus for y <= <Im g>, x_minus - 2*pi - x_plus above.
struct ActionSample {
  double s;
  double ds;
  double d2s;
  double y;
};

/// A symbol g on the circle held as a finite Fourier series
/// g(x) = sum_{|m| <= M} c_m e^{imx}.  All derived quantities (turning
/// points, the action and its derivatives, Poisson-bracket factors) are
/// evaluated from the coefficients in closed form.
///
/// The strip machinery requires Im g to have exactly one minimum and one
/// maximum on the circle.  The check runs at construction; a failing symbol
/// still evaluates pointwise but every strip-dependent accessor rethrows
/// MultipleCritical / DegenerateStrip.
class FourierSymbol {
 public:
  /// Grid resolution used to bracket the critical points of Im g.
  /// Resolves any truncation order M <= 512.
  static constexpr int kScanGrid = 4096;
  /// Bisection runs until the bracket is narrower than this.
  static constexpr double kBisectWidth = 1e-13;
  /// Heights within this margin of the strip boundary count as outside.
  static constexpr double kStripMargin = 1e-8;

  explicit FourierSymbol(std::map<int, Complex> coeffs);

  /// Builds a symbol from (m, re, im) triples as found in config files.
  static FourierSymbol from_triples(const std::vector<std::tuple<int, double, double>>& triples);

  /// g(x), g'(x) or g''(x) by exact Fourier summation; order in {0,1,2}.
  Complex eval(double x, int order = 0) const;

  /// Antiderivative G(x) = c_0 x + sum_{m != 0} c_m e^{imx} / (im).
  Complex antiderivative(double x) const;

  int order() const { return order_; }
  const std::map<int, Complex>& coeffs() const { return coeffs_; }

  Complex mean() const { return mean_; }
  double im_mean() const { return mean_.imag(); }
  double im_min() const { ensure_valid(); return im_min_; }
  double im_max() const { ensure_valid(); return im_max_; }

  /// Locations of the minimum (a) and maximum (b) of Im g, in [0, 2*pi).
  std::pair<double, double> critical_points() const {
    ensure_valid();
    return {crit_min_, crit_max_};
  }
  double critical_min() const { ensure_valid(); return crit_min_; }
  double critical_max() const { ensure_valid(); return crit_max_; }

  bool inside_strip(double y) const;

  TurningPair turning_points(Complex z) const;
  ActionSample action(double y) const;

  /// W = (-Im g'(x_plus)) * (Im g'(x_minus)) > 0 inside the strip.
  double bracket_factor(double y) const;

  /// Signed distance min(Im z - min Im g, max Im g - Im z); negative outside.
  double boundary_distance(Complex z) const;

  /// Continuous branch of x_minus - x_plus in (0, 2*pi); the phase-space
  /// measure of {x : Im g(x) <= y} used by the Weyl count.
  double turning_gap(double y) const;

 private:
  double im_g(double x) const;
  double im_dg(double x) const;
  double bisect_im_g(double lo, double hi, double target) const;
  void scan_critical_points();
  void ensure_valid() const {
    if (defect_) throw Error(*defect_, defect_message_);
  }

  std::map<int, Complex> coeffs_;
  std::vector<Complex> flat_;  // index m + order_
  int order_ = 0;
  Complex mean_;
  double crit_min_ = 0.0;
  double crit_max_ = 0.0;
  double im_min_ = 0.0;
  double im_max_ = 0.0;
  std::optional<ErrorCode> defect_;
  std::string defect_message_;
};

}  // namespace hagerlab
