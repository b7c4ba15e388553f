#include "hagerlab/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "hagerlab/config_io.hpp"

namespace hagerlab {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void write_row(std::ofstream& out, const std::vector<double>& values) {
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format_number(values[i]);
  }
  out << '\n';
}

// Bin average of the theoretical density; the density varies by factors
// across one histogram bin near the accumulation spike, so a point value at
// the bin center would not be comparable to a histogram.
double bin_average_density(const FourierSymbol& symbol, const ModelParams& params,
                           double im_lo, double im_hi) {
  constexpr int kNodes = 32;  // composite Simpson with 32 cells
  const double step = (im_hi - im_lo) / kNodes;
  double sum = 0.0;
  auto dens = [&](double y) {
    if (!symbol.inside_strip(y)) return 0.0;
    return density_components(symbol, params, Complex(0.0, y)).density;
  };
  for (int i = 0; i < kNodes; ++i) {
    const double a = im_lo + i * step;
    sum += step / 6.0 * (dens(a) + 4.0 * dens(a + 0.5 * step) + dens(a + step));
  }
  return sum / (im_hi - im_lo);
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  uint64_t hash = 0xcbf29ce484222325ull;
  char chunk[65536];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(chunk[i]);
      hash *= 0x100000001b3ull;
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a:%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::vector<ProfileTableRow> build_profile_table(const EnsembleResult& result,
                                                 const FourierSymbol& symbol,
                                                 const ModelParams& params) {
  const ImHistogram& hist = result.im_histogram;
  const Box& box = result.config.box;
  const int bins = static_cast<int>(hist.mean_count.size());
  const double bin_h = box.height() / bins;
  const double area = bin_h * box.width();

  std::vector<ProfileTableRow> rows(bins);
  double cum_emp = 0.0, cum_theory = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double lo = hist.edges[b], hi = hist.edges[b + 1];
    const double center = 0.5 * (lo + hi);
    ProfileTableRow& row = rows[b];
    row.im_z = center;
    row.emp_density = hist.mean_density[b];
    row.emp_stderr = hist.stderr_density[b];
    const DensityValue dv = density_components(symbol, params, Complex(0.0, center));
    row.psi1 = dv.psi1;
    row.log_psi2 = dv.log_psi2;
    row.log_theta = dv.log_theta;
    row.theory_density = bin_average_density(symbol, params, lo, hi);
    cum_emp += hist.mean_count[b];
    cum_theory += row.theory_density * area;
    row.cum_emp = cum_emp;
    row.cum_theory = cum_theory;
    row.cum_weyl = weyl_count(symbol, params, Box{box.re0, box.re1, box.im0, hi});
  }
  return rows;
}

std::vector<CurveRow> build_curves_table(const FourierSymbol& symbol,
                                         const ModelParams& params, double re0, double re1,
                                         int points) {
  const auto [y_minus, y_plus] = y_levels(symbol, params);
  std::vector<CurveRow> rows;
  rows.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double re = points == 1 ? re0 : re0 + (re1 - re0) * i / (points - 1);
    rows.push_back(CurveRow{re, gamma_im(symbol, params, re, Side::minus),
                            gamma_im(symbol, params, re, Side::plus),
                            Gamma_im(symbol, params, re, Side::minus),
                            Gamma_im(symbol, params, re, Side::plus), y_minus, y_plus});
  }
  return rows;
}

void write_eigenvalues_csv(const std::filesystem::path& path, const EnsembleResult& result) {
  if (!result.spectra)
    throw Error(ErrorCode::EigenvaluesNotRetained,
                "eigenvalues.csv needs retain_eigenvalues = true");
  std::ofstream out = open_for_write(path);
  out << "trial,re,im\n";
  for (size_t t = 0; t < result.spectra->size(); ++t)
    for (const Complex& z : (*result.spectra)[t])
      out << t << ',' << format_number(z.real()) << ',' << format_number(z.imag()) << '\n';
}

void write_profile_csv(const std::filesystem::path& path,
                       const std::vector<ProfileTableRow>& rows) {
  std::ofstream out = open_for_write(path);
  out << "im_z,emp_density,stderr,psi1,log_psi2,log_theta,theory_density,cum_emp,"
         "cum_theory,cum_weyl\n";
  for (const ProfileTableRow& r : rows)
    write_row(out, {r.im_z, r.emp_density, r.emp_stderr, r.psi1, r.log_psi2, r.log_theta,
                    r.theory_density, r.cum_emp, r.cum_theory, r.cum_weyl});
}

void write_pseudospec_csv(const std::filesystem::path& path,
                          const std::vector<PseudospecPoint>& points) {
  std::ofstream out = open_for_write(path);
  out << "re,im,log_sigma_min,log_t0_pred,flag\n";
  for (const PseudospecPoint& p : points) {
    out << format_number(p.re) << ',' << format_number(p.im) << ','
        << format_number(p.log_sigma_min) << ',' << format_number(p.log_t0_pred) << ','
        << (p.underflow_zone ? 1 : 0) << '\n';
  }
}

void write_curves_csv(const std::filesystem::path& path, const std::vector<CurveRow>& rows) {
  std::ofstream out = open_for_write(path);
  out << "re,gamma_minus,gamma_plus,Gamma_minus,Gamma_plus,y_minus,y_plus\n";
  for (const CurveRow& r : rows)
    write_row(out, {r.re, r.gamma_minus, r.gamma_plus, r.Gamma_minus, r.Gamma_plus,
                    r.y_minus, r.y_plus});
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  nlohmann::json doc;
  doc["version"] = manifest.version;
  doc["seed"] = manifest.seed;
  doc["wall_seconds"] = manifest.wall_seconds;
  doc["config"] = nlohmann::json::parse(config_to_json_text(manifest.config));
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckSummary& c : manifest.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  doc["checks"] = checks;
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [name, hash] : manifest.files) files[name] = hash;
  doc["files"] = files;

  std::ofstream out = open_for_write(path);
  out << doc.dump(2) << '\n';
}

RunManifest write_outputs(const EnsembleResult& result,
                          const std::vector<ProfileTableRow>& profile,
                          const std::vector<PseudospecPoint>& pseudospec,
                          const std::vector<CurveRow>& curves,
                          const std::filesystem::path& out_dir,
                          std::vector<CheckSummary> checks) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string());

  RunManifest manifest;
  manifest.seed = result.config.seed;
  manifest.wall_seconds = result.wall_seconds;
  manifest.config = result.config;
  manifest.checks = std::move(checks);

  auto add = [&](const std::string& name) {
    manifest.files.emplace_back(name, hash_file(out_dir / name));
  };
  if (result.spectra) {
    write_eigenvalues_csv(out_dir / "eigenvalues.csv", result);
    add("eigenvalues.csv");
  }
  if (!profile.empty()) {
    write_profile_csv(out_dir / "profile.csv", profile);
    add("profile.csv");
  }
  if (!pseudospec.empty()) {
    write_pseudospec_csv(out_dir / "pseudospec.csv", pseudospec);
    add("pseudospec.csv");
  }
  if (!curves.empty()) {
    write_curves_csv(out_dir / "curves.csv", curves);
    add("curves.csv");
  }
  write_manifest(out_dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace hagerlab
