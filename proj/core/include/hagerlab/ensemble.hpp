#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "hagerlab/dense_matrix.hpp"
#include "hagerlab/theory.hpp"

namespace hagerlab {

/// How the coupling is specified: a literal delta, the expression
/// exp(-1/h), or through epsilon0.
struct DeltaSpec {
  enum class Kind { literal, exp_inv_h, epsilon0 };
  Kind kind = Kind::exp_inv_h;
  double value = 0.0;  // literal delta or epsilon0; unused for exp(-1/h)

  double resolve(double h) const;
};

struct ExperimentConfig {
  std::vector<std::tuple<int, double, double>> symbol_triples = {{-1, 1.0, 0.0}};
  double h = 0.05;
  DeltaSpec delta;
  int n_trunc = 800;
  int trials = 100;
  Box box{-10.0, 10.0, -1.0 + 1e-6, 1.0 - 1e-6};
  int bins = 100;
  uint64_t seed = 1;
  double gaussian_scale = 1.0;
  bool retain_eigenvalues = false;

  FourierSymbol make_symbol() const;
  ModelParams make_params(const FourierSymbol& symbol) const;
  /// Throws ConfigError when an invariant (trials >= 1, bins >= 2, box inside
  /// the strip) is broken.
  void validate() const;
};

struct ImHistogram {
  std::vector<double> edges;          // bins + 1 entries
  std::vector<double> mean_count;     // per bin
  std::vector<double> mean_density;   // mean_count / (bin height * window width)
  std::vector<double> stderr_density;
};

struct EnsembleResult {
  ExperimentConfig config;
  int dim = 0;
  double delta = 0.0;
  std::optional<std::vector<std::vector<Complex>>> spectra;  // per trial, if retained
  std::vector<double> box_counts;                            // per trial
  ImHistogram im_histogram;
  int hs_norm_exceedances = 0;  // trials with ||R||_HS > dim / sqrt(ln dim)
  double wall_seconds = 0.0;
};

/// Runs `config.trials` independent spectra of H + delta R.  Trial t draws
/// its Gaussian matrix from substream_seed(seed, t), so the result is
/// identical for a fixed seed regardless of worker count.
EnsembleResult run_spectrum_ensemble(const ExperimentConfig& config, int workers = 0);

struct BoxCount {
  double mean;
  double stderr;
};

/// Per-trial counts of eigenvalues strictly inside `box`; requires retention.
BoxCount count_in_box(const EnsembleResult& result, const Box& box);

struct ProfileRow {
  double im_lo;
  double im_hi;
  double mean_count;
  double emp_density;
  double emp_stderr;
  double cum_mean_count;
};

/// Histogram along Im z of eigenvalues with Re z in the window; requires
/// retention.
std::vector<ProfileRow> im_profile(const EnsembleResult& result,
                                   std::pair<double, double> re_window, int bins);

struct PseudospecPoint {
  double re;
  double im;
  double log_sigma_min;
  double sigma_gap;  // sigma_1^2 - sigma_0^2
  double log_t0_pred;
  bool underflow_zone;  // S(Im z)/h > 30: excluded from comparisons
};

/// sigma_min of (H - z) over a grid, paired with the closed-form prediction.
std::vector<PseudospecPoint> pseudospectrum_grid(const FourierSymbol& symbol,
                                                 const ModelParams& params, int n_trunc,
                                                 const Box& box, int nx, int ny,
                                                 int workers = 0);

struct TunnelingMeasurement {
  double log_overlap;  // ln |<right_0, left_0>|
  double gap;          // sigma_1^2 - sigma_0^2
  double sigma0;
  double sigma1;
};

TunnelingMeasurement tunneling_measurement(const FourierSymbol& symbol,
                                           const ModelParams& params, int n_trunc,
                                           Complex z);

}  // namespace hagerlab
