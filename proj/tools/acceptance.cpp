// Evaluates the twelve acceptance criteria with the pinned tolerances and
// prints one line per criterion.  Exit status is the number of failures.
#include <chrono>
#include <cstdio>
#include <exception>
#include <sstream>

#include "kahler/acceptance.hpp"

int main() {
  const kahler::SuiteOptions opt;
  int failures = 0;
  for (const auto& c : kahler::criteria()) {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream line;
    try {
      const auto out = kahler::run_criterion(c.id, opt);
      const auto& r = out.record;
      failures += r.pass ? 0 : 1;
      line << (r.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.title << "):";
      for (const auto& [k, v] : r.values) line << ' ' << k << '=' << v;
      if (r.trend_slope == r.trend_slope) line << " trend_slope=" << r.trend_slope << " lsq_residual=" << r.trend_residual;
      if (!r.detail.empty()) line << "  [" << r.detail << ']';
    } catch (const std::exception& e) {
      ++failures;
      line << "FAIL  criterion " << c.id << " (" << c.title << "): error: " << e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  (%.1fs)\n", line.str().c_str(), s);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, kahler::criteria().size());
  return failures;
}
