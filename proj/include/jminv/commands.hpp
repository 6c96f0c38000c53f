#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "jminv/io.hpp"

namespace jminv {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNonConvergence = 2, kExitVerification = 3 };

/// Run `body`, mapping library exceptions to exit codes (message to `err`).
int run_guarded(const std::function<int()>& body, std::ostream& err);

int cmd_reconstruct(const RunConfig& cfg, std::ostream& out);
int cmd_forward(const RunConfig& cfg, std::vector<std::string> hamiltonian_files, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);
int cmd_tables(const RunConfig& cfg, std::ostream& out);

/// One line of a pass/fail report.
struct Check {
  std::string name;
  bool pass = false;
  double measured = 0, tolerance = 0;
  std::string note;
};
std::string format_check(const Check& c);

}  // namespace jminv
