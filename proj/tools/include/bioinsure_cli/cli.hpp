#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bioinsure::cli {

enum class Command { value, optimize, simulate, resilience };
enum class OutputFormat { json, csv };

/// Sweep grid "lo:hi:steps": steps intervals, steps + 1 points.
struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t steps = 100;
};

struct RunManifest {
  Command command = Command::value;
  std::string scenario_path;
  std::uint64_t seed = 0;
  OutputFormat output_format = OutputFormat::json;
  std::optional<GridSpec> grid;
  std::vector<double> lambdas;
  std::uint64_t trials = 10000;
  std::optional<std::uint64_t> horizon;
  unsigned workers = 0;
  std::optional<std::string> trajectory_path;
  std::uint64_t trajectory_trial = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

GridSpec parse_grid(std::string_view text);

/// Executes one manifest. Reports go to `out`, diagnostics to `err`.
/// Returns 0 on success, 1 on validation errors, 2 on numerical failure.
int run(const RunManifest& manifest, std::ostream& out, std::ostream& err);

/// Parses command-line arguments into a manifest and runs it.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Fixed 12-significant-digit rendering used for every CSV number. Throws
/// NumericalError for non-finite input.
std::string format_csv_number(double x);

}  // namespace bioinsure::cli
