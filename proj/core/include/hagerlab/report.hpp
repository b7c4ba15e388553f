#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hagerlab/ensemble.hpp"

namespace hagerlab {

inline constexpr const char* kVersion = "0.1.0";

struct CheckSummary {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunManifest {
  std::string version = kVersion;
  uint64_t seed = 0;
  double wall_seconds = 0.0;
  ExperimentConfig config;
  std::vector<CheckSummary> checks;
  std::vector<std::pair<std::string, std::string>> files;  // name -> content hash
};

/// Row of profile.csv: empirical histogram next to the theoretical density
/// and the three integrated profiles.  theory_density is the bin average of
/// the density (the honest comparator for a histogram), cum_weyl the Weyl
/// count of the window up to the bin's upper edge.
struct ProfileTableRow {
  double im_z;  // bin center
  double emp_density;
  double emp_stderr;
  double psi1;
  double log_psi2;
  double log_theta;
  double theory_density;
  double cum_emp;
  double cum_theory;
  double cum_weyl;
};

std::vector<ProfileTableRow> build_profile_table(const EnsembleResult& result,
                                                 const FourierSymbol& symbol,
                                                 const ModelParams& params);

struct CurveRow {
  double re;
  double gamma_minus;
  double gamma_plus;
  double Gamma_minus;
  double Gamma_plus;
  double y_minus;
  double y_plus;
};

std::vector<CurveRow> build_curves_table(const FourierSymbol& symbol,
                                         const ModelParams& params, double re0, double re1,
                                         int points);

/// Formats a double as scientific notation with 17 significant digits,
/// locale-independent; round-trips losslessly through strtod.
std::string format_number(double value);

/// FNV-1a 64 hash of a file's bytes, as "fnv1a:<hex>".
std::string hash_file(const std::filesystem::path& path);

void write_eigenvalues_csv(const std::filesystem::path& path, const EnsembleResult& result);
void write_profile_csv(const std::filesystem::path& path,
                       const std::vector<ProfileTableRow>& rows);
void write_pseudospec_csv(const std::filesystem::path& path,
                          const std::vector<PseudospecPoint>& points);
void write_curves_csv(const std::filesystem::path& path, const std::vector<CurveRow>& rows);
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

/// Writes every table that the inputs support into out_dir and returns the
/// manifest (also written as manifest.json).  Pass empty vectors to skip a
/// table.
RunManifest write_outputs(const EnsembleResult& result,
                          const std::vector<ProfileTableRow>& profile,
                          const std::vector<PseudospecPoint>& pseudospec,
                          const std::vector<CurveRow>& curves,
                          const std::filesystem::path& out_dir,
                          std::vector<CheckSummary> checks = {});

}  // namespace hagerlab
