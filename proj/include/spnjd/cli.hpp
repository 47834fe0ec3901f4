#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spnjd/spn.hpp"

namespace spnjd::cli {

enum class Command { semiflows, ode, sde, ssa, ctmc, compare };
enum class OutputFormat { csv, json };

inline constexpr std::uint64_t kDefaultSeed = 42;

enum ExitCode : int { kOk = 0, kUsage = 1, kModelInvalid = 2, kEngineFailure = 3 };

struct RunRequest {
  Command command = Command::semiflows;
  std::string model;            // file path or bundled model name
  std::optional<Count> scale;   // initial marking = scale * alpha
  double t_final = 1.0;
  double step = 0.01;
  std::size_t runs = 1000;
  std::uint64_t seed = kDefaultSeed;
  double tolerance = 1e-12;
  std::size_t cap = 1'000'000;
  double level = 0.95;
  double trace_every = 0.0;
  double output_every = 0.0;   // ode: thin the trajectory; 0 = every step
  bool exact_bounds = false;
  std::vector<std::string> engines;  // compare: exactly two of ode, sde, ssa, ctmc
  std::optional<std::filesystem::path> out_dir;
  OutputFormat format = OutputFormat::csv;
  std::size_t workers = 0;  // 0 = SPNJD_WORKERS or hardware concurrency
};

/// Shortest decimal string that round-trips to the same double.
std::string format_number(double x);

/// Existing file path first, then bundled model name; --scale applied.
SpnModel load_model(const std::string& spec, std::optional<Count> scale = std::nullopt);

/// Executes a request. Primary output goes to `out` (or files under
/// out_dir); the effective seed and diagnostics go to `err`.
int run(const RunRequest& request, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11) and runs. Returns the process exit code.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spnjd::cli
