// Command-line entry point: wires config files and overrides into the
// simulation and theory modules and serializes the results.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hagerlab/acceptance.hpp"
#include "hagerlab/config_io.hpp"
#include "hagerlab/parallel.hpp"
#include "hagerlab/report.hpp"

namespace {

using namespace hagerlab;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "hagerlab-out";
  std::optional<double> h;
  std::optional<std::string> delta;
  std::optional<double> epsilon0;
  std::optional<int> n_trunc;
  std::optional<int> trials;
  std::optional<int> bins;
  std::optional<uint64_t> seed;
  std::optional<double> gaussian_scale;
  std::vector<double> box;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-c,--config", opts.config_path, "JSON config file");
  cmd->add_option("-o,--out", opts.out_dir, "output directory");
  cmd->add_option("--h", opts.h, "semiclassical parameter h");
  cmd->add_option("--delta", opts.delta, "coupling delta (number or \"exp(-1/h)\")");
  cmd->add_option("--epsilon0", opts.epsilon0, "coupling via epsilon0");
  cmd->add_option("--n", opts.n_trunc, "Fourier truncation N (matrix dim 2N+1)");
  cmd->add_option("--trials", opts.trials, "Monte-Carlo realizations");
  cmd->add_option("--bins", opts.bins, "histogram bins along Im z");
  cmd->add_option("--seed", opts.seed, "RNG seed; all randomness derives from it");
  cmd->add_option("--gaussian-scale", opts.gaussian_scale,
                  "scale factor on the Gaussian entries (default 1)");
  cmd->add_option("--box", opts.box, "counting box re0,re1,im0,im1")->expected(4)->delimiter(',');
}

ExperimentConfig build_config(const CommonOpts& opts) {
  ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config(opts.config_path);
  if (opts.h) cfg.h = *opts.h;
  if (opts.delta && opts.epsilon0)
    throw Error(ErrorCode::ConfigError, "give exactly one of --delta and --epsilon0");
  if (opts.delta) {
    if (*opts.delta == "exp(-1/h)") {
      cfg.delta = DeltaSpec{DeltaSpec::Kind::exp_inv_h, 0.0};
    } else {
      try {
        size_t used = 0;
        const double value = std::stod(*opts.delta, &used);
        if (used != opts.delta->size()) throw std::invalid_argument("trailing characters");
        cfg.delta = DeltaSpec{DeltaSpec::Kind::literal, value};
      } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError,
                    "--delta expects a number or the string \"exp(-1/h)\", got \"" +
                        *opts.delta + "\"");
      }
    }
  }
  if (opts.epsilon0) cfg.delta = DeltaSpec{DeltaSpec::Kind::epsilon0, *opts.epsilon0};
  if (opts.n_trunc) cfg.n_trunc = *opts.n_trunc;
  if (opts.trials) cfg.trials = *opts.trials;
  if (opts.bins) cfg.bins = *opts.bins;
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.gaussian_scale) cfg.gaussian_scale = *opts.gaussian_scale;
  if (!opts.box.empty()) cfg.box = Box{opts.box[0], opts.box[1], opts.box[2], opts.box[3]};
  return cfg;
}

int run_spectrum(const CommonOpts& opts) {
  ExperimentConfig cfg = build_config(opts);
  cfg.retain_eigenvalues = true;
  const EnsembleResult result = run_spectrum_ensemble(cfg);
  write_outputs(result, {}, {}, {}, opts.out_dir);
  std::printf("%d trials, dim %d, delta = %s -> %s/eigenvalues.csv\n", cfg.trials,
              result.dim, format_number(result.delta).c_str(), opts.out_dir.c_str());
  return 0;
}

int run_density_profile(const CommonOpts& opts) {
  const ExperimentConfig cfg = build_config(opts);
  const FourierSymbol symbol = cfg.make_symbol();
  const ModelParams params = cfg.make_params(symbol);
  const EnsembleResult result = run_spectrum_ensemble(cfg);
  const auto profile = build_profile_table(result, symbol, params);
  write_outputs(result, profile, {}, {}, opts.out_dir);
  std::printf("%zu profile bins -> %s/profile.csv\n", profile.size(), opts.out_dir.c_str());
  return 0;
}

int run_pseudospec(const CommonOpts& opts, int nx, int ny) {
  const ExperimentConfig cfg = build_config(opts);
  const FourierSymbol symbol = cfg.make_symbol();
  const ModelParams params = cfg.make_params(symbol);
  const auto points =
      pseudospectrum_grid(symbol, params, cfg.n_trunc, cfg.box, nx, ny);

  std::filesystem::create_directories(opts.out_dir);
  write_pseudospec_csv(std::filesystem::path(opts.out_dir) / "pseudospec.csv", points);
  std::printf("%zu grid points -> %s/pseudospec.csv\n", points.size(), opts.out_dir.c_str());
  return 0;
}

int run_curves(const CommonOpts& opts, double re0, double re1, int points) {
  const ExperimentConfig cfg = build_config(opts);
  const FourierSymbol symbol = cfg.make_symbol();
  const ModelParams params = cfg.make_params(symbol);
  const auto rows = build_curves_table(symbol, params, re0, re1, points);

  std::filesystem::create_directories(opts.out_dir);
  write_curves_csv(std::filesystem::path(opts.out_dir) / "curves.csv", rows);
  std::printf("%d abscissae -> %s/curves.csv\n", points, opts.out_dir.c_str());
  return 0;
}

int run_theory_eval(const CommonOpts& opts, std::optional<double> im0,
                    std::optional<double> im1, int points, const std::string& out_file) {
  const ExperimentConfig cfg = build_config(opts);
  const FourierSymbol symbol = cfg.make_symbol();
  const ModelParams params = cfg.make_params(symbol);
  const double margin = 0.01 * (symbol.im_max() - symbol.im_min());
  const double lo = im0 ? *im0 : symbol.im_min() + margin;
  const double hi = im1 ? *im1 : symbol.im_max() - margin;
  const auto rows = theory_profile(symbol, params, lo, hi, points);

  FILE* out = stdout;
  if (!out_file.empty()) {
    out = std::fopen(out_file.c_str(), "wb");
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + out_file);
  }
  std::fprintf(out, "im_z,s,ds,w,psi1,log_psi2,log_theta,density\n");
  for (const TheoryRow& r : rows)
    std::fprintf(out, "%s,%s,%s,%s,%s,%s,%s,%s\n", format_number(r.im_z).c_str(),
                 format_number(r.s).c_str(), format_number(r.ds).c_str(),
                 format_number(r.w).c_str(), format_number(r.psi1).c_str(),
                 format_number(r.log_psi2).c_str(), format_number(r.log_theta).c_str(),
                 format_number(r.density).c_str());
  if (out != stdout) std::fclose(out);
  return 0;
}

int run_verify(const CommonOpts& opts) {
  AcceptanceOptions acc;
  acc.out_dir = opts.out_dir == "hagerlab-out" ? "hagerlab-verify" : opts.out_dir;
  if (opts.seed) acc.seed = *opts.seed;
  const auto results = run_acceptance(acc);
  if (all_passed(results)) {
    std::printf("verify: all %zu criteria passed\n", results.size());
    return 0;
  }
  std::string failing;
  for (const CriterionResult& r : results)
    if (!r.pass) failing += (failing.empty() ? "" : ", ") + r.name;
  std::fprintf(stderr, "verify: FAILED criteria: %s\n", failing.c_str());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  // Keep BLAS single-threaded by default: trial-level parallelism plus a
  // fixed reduction order is what makes runs byte-reproducible.
  setenv("OPENBLAS_NUM_THREADS", "1", 0);

  CLI::App app{"Spectral simulator for randomly perturbed hD + g(x) on the circle"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  CommonOpts opts;
  int nx = 40, ny = 20, points = 181, curve_points = 21;
  std::optional<double> im0, im1;
  double re0 = -0.475, re1 = 0.475;
  std::string theory_out;

  CLI::App* spectrum =
      app.add_subcommand("spectrum", "Monte-Carlo eigenvalue ensemble -> eigenvalues.csv");
  add_common(spectrum, opts);

  CLI::App* profile = app.add_subcommand(
      "density-profile", "empirical vs theoretical Im-density -> profile.csv");
  add_common(profile, opts);

  CLI::App* pseudo = app.add_subcommand(
      "pseudospec", "sigma_min grid of the unperturbed operator -> pseudospec.csv");
  add_common(pseudo, opts);
  pseudo->add_option("--nx", nx, "grid columns");
  pseudo->add_option("--ny", ny, "grid rows");

  CLI::App* curves =
      app.add_subcommand("curves", "y, gamma and Gamma level curves -> curves.csv");
  add_common(curves, opts);
  curves->add_option("--re0", re0, "first abscissa");
  curves->add_option("--re1", re1, "last abscissa");
  curves->add_option("--points", curve_points, "number of abscissae");

  CLI::App* theory = app.add_subcommand(
      "theory-eval", "closed-form density components over an Im grid (CSV)");
  add_common(theory, opts);
  theory->add_option("--im0", im0, "first height");
  theory->add_option("--im1", im1, "last height");
  theory->add_option("--points", points, "grid size");
  theory->add_option("--csv", theory_out, "write to file instead of stdout");

  CLI::App* verify =
      app.add_subcommand("verify", "run the full verification suite (12 criteria)");
  add_common(verify, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (spectrum->parsed()) return run_spectrum(opts);
    if (profile->parsed()) return run_density_profile(opts);
    if (pseudo->parsed()) return run_pseudospec(opts, nx, ny);
    if (curves->parsed()) return run_curves(opts, re0, re1, curve_points);
    if (theory->parsed()) return run_theory_eval(opts, im0, im1, points, theory_out);
    if (verify->parsed()) return run_verify(opts);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
