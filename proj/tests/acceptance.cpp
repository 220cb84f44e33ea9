// Runs every acceptance criterion and prints one line per criterion.
// Usage: acceptance [ID...]

#include <iostream>
#include <string>
#include <vector>

#include "splitma/experiments.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> ids(argv + 1, argv + argc);
  if (ids.empty()) ids = splitma::criterion_ids();
  int failed = 0;
  for (const auto& id : ids) {
    if (!splitma::is_criterion(id)) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    const auto res = splitma::run_criterion(id);
    std::cout << splitma::summary_line(res) << std::endl;
    if (!res.passed) ++failed;
  }
  std::cout << (ids.size() - std::size_t(failed)) << "/" << ids.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
