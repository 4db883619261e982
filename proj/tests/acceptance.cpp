// Acceptance suite: runs every verification criterion at its pinned
// tolerance and prints one pass/fail line per criterion. Exit code is the
// number of failed criteria.

#include <cstdio>

#include "potts/verify.hpp"

int main() {
  potts::verify::Options opt;
  opt.seed = 7;
  auto results = potts::verify::run_all(opt);
  int failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] criterion %2d: %s (%.2fs)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds);
    if (!r.pass) {
      std::printf("       %s\n", r.details.dump().c_str());
      ++failures;
    }
  }
  std::printf("%zu/%zu criteria passed\n", results.size() - failures, results.size());
  return failures;
}
