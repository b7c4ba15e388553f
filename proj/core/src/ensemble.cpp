#include "hagerlab/ensemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "hagerlab/parallel.hpp"

namespace hagerlab {

double DeltaSpec::resolve(double h) const {
  switch (kind) {
    case Kind::literal:
      if (value < 0.0) throw Error(ErrorCode::ConfigError, "delta must be >= 0");
      return value;
    case Kind::exp_inv_h:
      return std::exp(-1.0 / h);
    case Kind::epsilon0:
      return std::sqrt(h) * std::exp(-value / h);
  }
  return 0.0;
}

FourierSymbol ExperimentConfig::make_symbol() const {
  return FourierSymbol::from_triples(symbol_triples);
}

ModelParams ExperimentConfig::make_params(const FourierSymbol& symbol) const {
  const double s_max = symbol.action(symbol.im_mean()).s;
  if (delta.kind == DeltaSpec::Kind::epsilon0)
    return ModelParams::from_epsilon0(h, delta.value, s_max);
  return ModelParams::from_delta(h, delta.resolve(h), s_max);
}

void ExperimentConfig::validate() const {
  if (!(h > 0.0)) throw Error(ErrorCode::ConfigError, "h must be positive");
  if (trials < 1) throw Error(ErrorCode::ConfigError, "trials must be >= 1");
  if (bins < 2) throw Error(ErrorCode::ConfigError, "bins must be >= 2");
  if (n_trunc < 1) throw Error(ErrorCode::ConfigError, "n must be >= 1");
  if (!(box.re0 < box.re1) || !(box.im0 < box.im1))
    throw Error(ErrorCode::ConfigError, "box must have positive extent");
  const FourierSymbol symbol = make_symbol();
  if (box.im0 < symbol.im_min() || box.im1 > symbol.im_max())
    throw Error(ErrorCode::ConfigError, "box exceeds the strip");
}

namespace {

struct TrialAccumulator {
  std::vector<double> bin_counts;
  double box_count = 0.0;
  double hs_norm = 0.0;
  std::vector<Complex> spectrum;  // kept only under retention
};

void bin_spectrum(const std::vector<Complex>& eigs, const Box& box, int bins,
                  TrialAccumulator& acc) {
  acc.bin_counts.assign(bins, 0.0);
  const double bin_h = box.height() / bins;
  for (const Complex& z : eigs) {
    if (!box.contains(z)) continue;
    int idx = static_cast<int>((z.imag() - box.im0) / bin_h);
    idx = std::clamp(idx, 0, bins - 1);
    acc.bin_counts[idx] += 1.0;
  }
  acc.box_count = std::accumulate(acc.bin_counts.begin(), acc.bin_counts.end(), 0.0);
}

double sample_stderr(const std::vector<double>& xs, double mean) {
  const size_t n = xs.size();
  if (n < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
}

}  // namespace

EnsembleResult run_spectrum_ensemble(const ExperimentConfig& config, int workers) {
  config.validate();
  const auto t_start = std::chrono::steady_clock::now();
  if (workers <= 0) workers = default_workers();

  const FourierSymbol symbol = config.make_symbol();
  const ComplexDenseMatrix op = assemble_operator(symbol, config.h, config.n_trunc);
  const int dim = op.dim();
  // The spectrum run itself needs only the resolved coupling; regime
  // validation against S(<Im g>) happens where theory values are requested.
  const double delta = config.delta.resolve(config.h);
  const double coupling = delta * config.gaussian_scale;

  std::vector<TrialAccumulator> per_trial(config.trials);
  parallel_for(config.trials, workers, [&](int t) {
    TrialAccumulator& acc = per_trial[t];
    std::vector<Complex> eigs;
    if (coupling == 0.0) {
      eigs = eigenvalues(op);
    } else {
      GaussianStream stream(GaussianStream::substream_seed(config.seed, t));
      const ComplexDenseMatrix noise = sample_gaussian(dim, stream);
      acc.hs_norm = noise.frobenius_norm();
      ComplexDenseMatrix perturbed = op;
      Complex* dst = perturbed.data();
      const Complex* src = noise.data();
      const size_t total = static_cast<size_t>(dim) * dim;
      for (size_t i = 0; i < total; ++i) dst[i] += coupling * src[i];
      try {
        eigs = eigenvalues(perturbed);
      } catch (const Error& e) {
        throw Error(e.code(), "trial " + std::to_string(t) + ": " + e.what());
      }
    }
    bin_spectrum(eigs, config.box, config.bins, acc);
    if (config.retain_eigenvalues) acc.spectrum = std::move(eigs);
  });

  // Aggregation runs in trial order so the output is independent of how the
  // pool interleaved the work.
  EnsembleResult result;
  result.config = config;
  result.dim = dim;
  result.delta = delta;
  result.box_counts.reserve(config.trials);
  if (config.retain_eigenvalues) result.spectra.emplace();

  const double hs_threshold = dim / std::sqrt(std::log(static_cast<double>(dim)));
  std::vector<std::vector<double>> bin_counts;
  bin_counts.reserve(config.trials);
  for (TrialAccumulator& acc : per_trial) {
    result.box_counts.push_back(acc.box_count);
    if (acc.hs_norm > hs_threshold) ++result.hs_norm_exceedances;
    bin_counts.push_back(std::move(acc.bin_counts));
    if (result.spectra) result.spectra->push_back(std::move(acc.spectrum));
  }

  ImHistogram& hist = result.im_histogram;
  const int bins = config.bins;
  const double bin_h = config.box.height() / bins;
  const double area = bin_h * config.box.width();
  hist.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) hist.edges[b] = config.box.im0 + b * bin_h;
  hist.mean_count.assign(bins, 0.0);
  hist.mean_density.assign(bins, 0.0);
  hist.stderr_density.assign(bins, 0.0);
  std::vector<double> column(config.trials);
  for (int b = 0; b < bins; ++b) {
    for (int t = 0; t < config.trials; ++t) column[t] = bin_counts[t][b];
    const double mean =
        std::accumulate(column.begin(), column.end(), 0.0) / config.trials;
    hist.mean_count[b] = mean;
    hist.mean_density[b] = mean / area;
    hist.stderr_density[b] = sample_stderr(column, mean) / area;
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

BoxCount count_in_box(const EnsembleResult& result, const Box& box) {
  if (!result.spectra)
    throw Error(ErrorCode::EigenvaluesNotRetained,
                "count_in_box needs retain_eigenvalues = true");
  std::vector<double> counts;
  counts.reserve(result.spectra->size());
  for (const auto& spectrum : *result.spectra) {
    double c = 0.0;
    for (const Complex& z : spectrum)
      if (box.contains(z)) c += 1.0;
    counts.push_back(c);
  }
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / counts.size();
  return BoxCount{mean, sample_stderr(counts, mean)};
}

std::vector<ProfileRow> im_profile(const EnsembleResult& result,
                                   std::pair<double, double> re_window, int bins) {
  if (!result.spectra)
    throw Error(ErrorCode::EigenvaluesNotRetained,
                "im_profile needs retain_eigenvalues = true");
  if (bins < 1) throw Error(ErrorCode::ConfigError, "bins must be >= 1");
  const double im0 = result.config.box.im0, im1 = result.config.box.im1;
  const double bin_h = (im1 - im0) / bins;
  const double width = re_window.second - re_window.first;
  const size_t trials = result.spectra->size();

  std::vector<std::vector<double>> counts(trials, std::vector<double>(bins, 0.0));
  for (size_t t = 0; t < trials; ++t) {
    for (const Complex& z : (*result.spectra)[t]) {
      if (z.real() <= re_window.first || z.real() >= re_window.second) continue;
      if (z.imag() <= im0 || z.imag() >= im1) continue;
      int idx = static_cast<int>((z.imag() - im0) / bin_h);
      idx = std::clamp(idx, 0, bins - 1);
      counts[t][idx] += 1.0;
    }
  }

  std::vector<ProfileRow> rows(bins);
  std::vector<double> column(trials);
  double cum = 0.0;
  for (int b = 0; b < bins; ++b) {
    for (size_t t = 0; t < trials; ++t) column[t] = counts[t][b];
    const double mean = std::accumulate(column.begin(), column.end(), 0.0) / trials;
    cum += mean;
    rows[b] = ProfileRow{im0 + b * bin_h,       im0 + (b + 1) * bin_h,
                         mean,                  mean / (bin_h * width),
                         sample_stderr(column, mean) / (bin_h * width), cum};
  }
  return rows;
}

std::vector<PseudospecPoint> pseudospectrum_grid(const FourierSymbol& symbol,
                                                 const ModelParams& params, int n_trunc,
                                                 const Box& box, int nx, int ny,
                                                 int workers) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::ConfigError, "grid must be at least 1x1");
  if (workers <= 0) workers = default_workers();
  const ComplexDenseMatrix op = assemble_operator(symbol, params.h, n_trunc);

  std::vector<PseudospecPoint> points(static_cast<size_t>(nx) * ny);
  parallel_for(nx * ny, workers, [&](int idx) {
    const int ix = idx % nx, iy = idx / nx;
    const double re = nx == 1 ? box.re0 : box.re0 + box.width() * ix / (nx - 1);
    const double im = ny == 1 ? box.im0 : box.im0 + box.height() * iy / (ny - 1);
    const Complex z(re, im);

    PseudospecPoint& pt = points[idx];
    pt.re = re;
    pt.im = im;
    pt.underflow_zone = symbol.action(im).s / params.h > 30.0;
    const std::vector<double> sigma = smallest_singular_values(op, z, 2);
    pt.log_sigma_min = std::log(sigma[0]);
    pt.sigma_gap = sigma[1] * sigma[1] - sigma[0] * sigma[0];
    try {
      pt.log_t0_pred = log_t0(symbol, params, z);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OnSpectrum) throw;
      pt.log_t0_pred = -std::numeric_limits<double>::infinity();
    }
  });
  return points;
}

TunnelingMeasurement tunneling_measurement(const FourierSymbol& symbol,
                                           const ModelParams& params, int n_trunc,
                                           Complex z) {
  if (!symbol.inside_strip(z.imag()))
    throw Error(ErrorCode::OutOfStrip, "tunneling measurement needs z inside the strip");
  const ComplexDenseMatrix op = assemble_operator(symbol, params.h, n_trunc);
  const std::vector<SingularTriplet> triplets = smallest_singular_triplets(op, z, 2);

  Complex overlap(0.0, 0.0);
  for (size_t i = 0; i < triplets[0].right.size(); ++i)
    overlap += triplets[0].right[i] * std::conj(triplets[0].left[i]);

  TunnelingMeasurement out;
  out.sigma0 = triplets[0].sigma;
  out.sigma1 = triplets[1].sigma;
  out.gap = out.sigma1 * out.sigma1 - out.sigma0 * out.sigma0;
  out.log_overlap = std::log(std::abs(overlap));
  return out;
}

}  // namespace hagerlab
