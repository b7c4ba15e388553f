// Verification suite runner: executes every desk-scale criterion and exits
// nonzero if any fails.  The same suite backs the CLI's verify subcommand.
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "hagerlab/acceptance.hpp"

int main(int argc, char** argv) {
  setenv("OPENBLAS_NUM_THREADS", "1", 0);

  hagerlab::AcceptanceOptions options;
  options.out_dir = "acceptance-out";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) {
      options.out_dir = argv[++i];
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      options.seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) {
      options.workers = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--out DIR] [--seed S] [--workers W]\n", argv[0]);
      return 2;
    }
  }

  const auto results = hagerlab::run_acceptance(options);
  int failed = 0;
  for (const auto& r : results)
    if (!r.pass) ++failed;
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}
