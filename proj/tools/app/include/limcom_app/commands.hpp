#pragma once

#include <iosfwd>

#include "limcom_app/checks.hpp"
#include "limcom_app/config.hpp"

namespace limcom::app {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailed = 1,
  kInvalidParameters = 2,
  kInfeasiblePromise = 3,
  kRuntimeFailure = 4,
};

/// Each command writes its files under cfg.out_dir (created if missing) and a
/// short human-readable summary to `log`. Errors propagate as limcom::Error.
int cmd_boundary(const RunConfig& cfg, std::ostream& log);
int cmd_value(const RunConfig& cfg, std::ostream& log);
int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_first_best(const RunConfig& cfg, std::ostream& log);
int cmd_infinite(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log, const SuiteOptions& opt = {});

/// Maps an exception escaping a command to the process exit code.
int exit_code_for(const std::exception& e);

/// Shortest decimal string that round-trips the double.
std::string exact(double x);

}  // namespace limcom::app
