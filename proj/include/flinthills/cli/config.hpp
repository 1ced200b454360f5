#ifndef FLINTHILLS_CLI_CONFIG_HPP
#define FLINTHILLS_CLI_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flinthills::cli {

enum class Command { sums, convergents, blocks, spikes, safe, weighted, split, general, criterion, probe, audit };
enum class Format { csv, json };

std::string_view to_string(Command command);

struct RunConfig {
  Command command = Command::sums;
  std::uint64_t n_max = 100000;
  int bits = 256;
  std::uint64_t stride = 1000;
  double tau = 0.1;
  double threshold = 1.0;
  double delta = 1.0;
  double eta = 1.0;
  double alpha = 0.5;
  double a = 3.0;
  double b = 2.0;
  double constant = 1.0;
  std::optional<double> nu;
  std::optional<double> mu;
  std::size_t k_max = 20;
  std::vector<std::size_t> k_list;  ///< blocks; empty means every k >= 1 with p_k <= n_max
  Format format = Format::csv;
  std::optional<std::string> checkpoint_path;
  bool resume = false;
  unsigned jobs = 1;
};

/// Bad command line. The message is a single line naming the flag.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// --help was given; carries the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses arguments (without the program name). Throws UsageError or
/// HelpRequested.
RunConfig parse_config(const std::vector<std::string>& args);

/// Requested bits, raised to required_bits(n_max, 8, 32) when that is larger.
/// `audit` never escalates.
int effective_bits(const RunConfig& config);

/// Fields that determine the numbers a resumable run produces, in a fixed
/// order. n_max, format, jobs and paths are deliberately absent.
std::string canonical_string(const RunConfig& config);

/// Hex SHA-256 of canonical_string().
std::string config_hash(const RunConfig& config);

}  // namespace flinthills::cli

#endif  // FLINTHILLS_CLI_CONFIG_HPP
