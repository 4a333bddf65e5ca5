#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace preacq::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;        // wall clock
  double budget_seconds = 0.0; // runtime limit; exceeding it fails the row
  std::string detail;
};

struct VerifyOptions {
  std::filesystem::path scenes_dir = "scenes";
  std::vector<int> only;  // empty = all
  std::optional<int> grid;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
};

std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts, std::ostream* log = nullptr);
void print_table(std::ostream& out, const std::vector<CriterionResult>& rows);
bool all_passed(const std::vector<CriterionResult>& rows);

}  // namespace preacq::verify
