// Acceptance runner: executes every registered end-to-end check and prints
// one line per check so a failure is attributable from the log alone.

#include <shiftlab/verify.hpp>

#include <cstdio>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  std::vector<std::string> ids;
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) ids.emplace_back(argv[i]);
  } else {
    ids = shiftlab::all_check_ids();
  }

  int failed = 0;
  for (const auto& id : ids) {
    shiftlab::CheckResult r = shiftlab::run_check(id);
    std::printf("[%s] %-28s (%6.2fs) %s\n", r.pass ? "PASS" : "FAIL",
                r.id.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }

  if (failed > 0) {
    std::printf("%d of %zu checks failed\n", failed, ids.size());
    return 1;
  }
  std::printf("all %zu checks passed\n", ids.size());
  return 0;
}
