// End-to-end checks of the command-line tool, driven through the shell.
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kCli = HAGERLAB_CLI_PATH;

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("hagerlab-cli-" + tag);
  fs::remove_all(dir);
  return dir;
}

size_t line_count(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("help and usage exit codes") {
  CHECK(run("--help") == 0);
  CHECK(run("spectrum --help") == 0);
  CHECK(run("density-profile --help") == 0);
  CHECK(run("pseudospec --help") == 0);
  CHECK(run("curves --help") == 0);
  CHECK(run("theory-eval --help") == 0);
  CHECK(run("verify --help") == 0);
  CHECK(run("no-such-subcommand") == 2);
  CHECK(run("") == 2);
}

TEST_CASE("config errors exit with code 2") {
  CHECK(run("spectrum --delta nope --n 5 --trials 1") == 2);
  CHECK(run("spectrum --delta 1e-9 --epsilon0 0.5 --n 5 --trials 1") == 2);
  CHECK(run("spectrum --config /nonexistent.json") == 2);
  CHECK(run("spectrum --delta 1e-9 --trials 0") == 2);
}

TEST_CASE("spectrum row-count contract and determinism") {
  const fs::path dir_a = temp_dir("spec-a");
  const fs::path dir_b = temp_dir("spec-b");
  const std::string common =
      "spectrum --h 0.05 --delta exp(-1/h) --n 400 --trials 10 --seed 7 --out ";
  REQUIRE(run(common + dir_a.string()) == 0);
  REQUIRE(run(common + dir_b.string()) == 0);

  // 10 trials x 801 eigenvalues plus a header line.
  CHECK(line_count(dir_a / "eigenvalues.csv") == 10 * 801 + 1);
  CHECK(fs::exists(dir_a / "manifest.json"));

  std::ifstream fa(dir_a / "eigenvalues.csv", std::ios::binary);
  std::ifstream fb(dir_b / "eigenvalues.csv", std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());
}

TEST_CASE("theory-eval emits the documented columns") {
  const fs::path dir = temp_dir("theory");
  fs::create_directories(dir);
  const fs::path csv = dir / "theory.csv";
  REQUIRE(run("theory-eval --h 0.05 --delta exp(-1/h) --im0 -0.9 --im1 0.9 --points 61 "
              "--csv " +
              csv.string()) == 0);
  std::ifstream in(csv);
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(header == "im_z,s,ds,w,psi1,log_psi2,log_theta,density");

  // Row at the center height: psi1 = (1/2h) d2s = 20.
  std::string line;
  bool found = false;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (std::abs(row[0]) < 1e-12) {
      found = true;
      CHECK(row[4] == doctest::Approx(20.0).epsilon(1e-9));
    }
  }
  CHECK(found);
}

TEST_CASE("curves subcommand writes the level curves") {
  const fs::path dir = temp_dir("curves");
  REQUIRE(run("curves --h 0.05 --delta exp(-1/h) --re0 -0.2 --re1 0.2 --points 3 --out " +
              dir.string()) == 0);
  CHECK(line_count(dir / "curves.csv") == 4);
}

TEST_CASE("pseudospec subcommand writes the sigma_min map") {
  const fs::path dir = temp_dir("pseudo");
  REQUIRE(run("pseudospec --h 0.1 --delta exp(-1/h) --n 150 --box -0.3,0.3,-0.7,-0.4 "
              "--nx 4 --ny 3 --out " +
              dir.string()) == 0);
  CHECK(line_count(dir / "pseudospec.csv") == 13);
}
