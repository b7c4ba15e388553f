#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "hagerlab/fourier_symbol.hpp"

namespace hagerlab {

/// Axis-aligned rectangle in the spectral plane.
struct Box {
  double re0, re1, im0, im1;
  double width() const { return re1 - re0; }
  double height() const { return im1 - im0; }
  double area() const { return width() * height(); }
  bool contains(Complex z) const {
    return z.real() > re0 && z.real() < re1 && z.imag() > im0 && z.imag() < im1;
  }
};

/// Semiclassical parameter h and coupling delta = sqrt(h) e^{-epsilon0/h}.
/// epsilon0 measures how far the coupling lets eigenvalues penetrate the
/// strip; it must stay below max_y S for the regime to make sense.
struct ModelParams {
  double h;
  double delta;
  double epsilon0;

  static ModelParams from_delta(double h, double delta,
                                std::optional<double> s_max = std::nullopt);
  static ModelParams from_epsilon0(double h, double epsilon0,
                                   std::optional<double> s_max = std::nullopt);
};

/// epsilon0 = -h ln(delta / sqrt(h)).
double epsilon0_from_delta(double h, double delta);

/// The oscillatory factor Phi with Re Phi = -(2*pi/h)|Im z - <Im g>| <= 0;
/// |1 - e^Phi| vanishes exactly on the unperturbed spectrum <g> + hZ.
struct PhiFactor {
  double re_phi;
  double im_phi;
  double abs_one_minus_exp;
};

PhiFactor phi_factor(const FourierSymbol& symbol, const ModelParams& params, Complex z);

/// ln of the predicted smallest singular value of P - z (the reciprocal of
/// the resolvent-norm law).
double log_t0(const FourierSymbol& symbol, const ModelParams& params, Complex z);

/// The average-density triple: psi1 the Weyl term, psi2 the tunneling spike
/// and theta the double-exponential cutoff, composed into
/// density = (psi1 + e^{log_psi2}) e^{-theta} / pi.  Exponentially scaled
/// parts are carried as natural logs and exponentiated only here, with
/// e^{-theta} flushed to 0 for theta > 700 and e^{log_psi2} to 0 below -700.
struct DensityValue {
  double psi1;
  double log_psi2;
  double log_theta;
  double theta;
  double density;
};

DensityValue density_components(const FourierSymbol& symbol, const ModelParams& params,
                                Complex z, bool phi_corrections = true);

/// Expected number of eigenvalues in `box` under the phase-space volume law.
double weyl_count(const FourierSymbol& symbol, const ModelParams& params, const Box& box);

enum class Side { minus, plus };

/// Heights y_-, y_+ with S(y_pm) = epsilon0, below/above the mean line.
std::pair<double, double> y_levels(const FourierSymbol& symbol, const ModelParams& params);

/// Height of the curve where the predicted smallest singular value equals
/// delta, at abscissa re_z, on the requested side of the mean line.
double gamma_im(const FourierSymbol& symbol, const ModelParams& params, double re_z,
                Side side);

/// Height at which the average density takes its local maximum near the
/// gamma curve, found by golden-section search.
double Gamma_im(const FourierSymbol& symbol, const ModelParams& params, double re_z,
                Side side);

/// ln |(e_0|f_0)| as predicted by the tunneling formula; valid away from
/// the mean line (guard |Im z - <Im g>| > 0.05).
double tunneling_overlap_prediction(const FourierSymbol& symbol, const ModelParams& params,
                                    Complex z);

/// WKB quasimodes for (P - z) and (P - z)^* sampled on a uniform grid over
/// [x_minus - 2*pi, x_minus), unit L2 norm under trapezoidal quadrature.
struct WkbSample {
  std::vector<Complex> e_wkb;
  std::vector<Complex> f_wkb;
  double residual_bound;
  double x0;
  double dx;
};

WkbSample wkb_sample(const FourierSymbol& symbol, const ModelParams& params, Complex z,
                     int grid_size);

/// Row of the theory-eval table.
struct TheoryRow {
  double im_z;
  double s;
  double ds;
  double w;
  double psi1;
  double log_psi2;
  double log_theta;
  double density;
};

std::vector<TheoryRow> theory_profile(const FourierSymbol& symbol, const ModelParams& params,
                                      double im0, double im1, int points,
                                      bool phi_corrections = true);

}  // namespace hagerlab
