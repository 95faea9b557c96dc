#pragma once

// Command-line front end:
//
//   trilinear simulate --n-excited N [--n-ground G --n-photons P]
//                      [--method exact|vanishing_variance|vanishing_asymmetry|
//                                quartic|closed_form]
//   trilinear compare  --n-excited N
//   trilinear ensemble --nbar NBAR [--per-l closed_form|exact] [--weights F]
//   trilinear predict  --nbar NBAR
//
// Common flags: --tau-max, --samples, --format csv|json, --output PATH,
// --rabi-hz F, --config FILE (key=value lines). TRILINEAR_THREADS caps the
// OpenMP thread count.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "trilinear/ensemble.hpp"
#include "trilinear/types.hpp"

namespace trilinear::cli {

/// Bad flags or flag combinations; maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { simulate, predict, compare, ensemble };
enum class OutputFormat { csv, json };

struct RunConfig {
  Command command = Command::simulate;
  SystemSpec spec{};
  Method method = Method::exact;
  double nbar = 0.0;
  ensemble::PerLMethod per_l = ensemble::PerLMethod::closed_form;
  double truncation_sigmas = 8.0;
  std::string weights_path;
  double revival_threshold = 0.03;
  std::optional<double> revival_window;
  std::optional<double> baseline;
  std::string revivals_path;
  double tau_max = 0.0;
  std::size_t samples = 0;
  OutputFormat format = OutputFormat::csv;
  std::string output_path;  // empty means stdout
  std::optional<double> rabi_hz;
};

/// Parses argv (argv[0] is the program name). Throws UsageError.
RunConfig parse_args(int argc, const char* const* argv);

/// Executes a parsed configuration, writing the artifact to the configured
/// path or to `out`. Library errors propagate.
void run(const RunConfig& config, std::ostream& out, std::ostream& log);

/// Full entry point: parse, apply TRILINEAR_THREADS, run, map errors to exit
/// status (0 ok, 1 numeric failure, 2 usage error).
int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err);

}  // namespace trilinear::cli
