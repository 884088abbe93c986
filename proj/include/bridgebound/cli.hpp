#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace bridgebound {

struct CliOptions {
  std::string suite = "all";
  std::optional<std::string> model_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int instances = 100;
  std::optional<double> tol;
};

/// Exit codes shared by all commands:
///   0  success (all reports pass / discrepancies in tolerance)
///   1  some inequality report failed
///   2  configuration error (bad flags, malformed model file) — nothing written
///   3  solver failure (no convergence, infeasible supports)
int cmd_verify(const CliOptions& opt);
int cmd_bridge(const CliOptions& opt);
int cmd_oracle_compare(const CliOptions& opt);

/// Dispatch + exception-to-exit-code mapping; prints errors to stderr.
int run_cli(const std::string& command, const CliOptions& opt);

}  // namespace bridgebound
