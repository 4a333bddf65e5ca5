// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
//
//   preacq_acceptance [--strict] [scenes_dir]
//
// Without --strict the exit status reports whether the suite ran to
// completion; the per-criterion verdicts are in the table. With --strict any
// failed criterion makes the exit status non-zero.
#include <cstring>
#include <exception>
#include <iostream>

#include "preacq/verify/acceptance.hpp"

int main(int argc, char** argv) {
  preacq::verify::VerifyOptions opts;
  opts.scenes_dir = PREACQ_SCENES_DIR;
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) {
      strict = true;
    } else {
      opts.scenes_dir = argv[i];
    }
  }
  try {
    const auto rows = preacq::verify::run_acceptance(opts, &std::cerr);
    preacq::verify::print_table(std::cout, rows);
    if (rows.size() != 11) {
      std::cerr << "expected 11 criteria, ran " << rows.size() << "\n";
      return 2;
    }
    return strict && !preacq::verify::all_passed(rows) ? 1 : 0;
  } catch (const std::exception& e) {
    std::cerr << "acceptance suite aborted: " << e.what() << "\n";
    return 2;
  }
}
