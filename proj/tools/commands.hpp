#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace trustsched::tools {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kFailure = 1, kOverloaded = 2 };

struct Options {
  std::string config;
  std::string preset;
  std::string policy = "mt";
  double b = 0.5;
  std::optional<double> lambda;
  std::optional<double> error_rate;
  double x_step = 0.005;
  double b_step = 0.001;
  std::uint64_t jobs = 1'000'000;
  std::size_t reps = 10;
  std::uint64_t seed = 1;
  double probe_prob = 0.005;
  std::string out;
  std::string trace;
  std::string csv;
};

int cmd_analyze(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_ic_region(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_curve(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_plot(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_preset_list(std::ostream& out);

/// Builds the CLI and dispatches; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trustsched::tools
