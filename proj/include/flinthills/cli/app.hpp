#ifndef FLINTHILLS_CLI_APP_HPP
#define FLINTHILLS_CLI_APP_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "flinthills/big_float.hpp"
#include "flinthills/cli/config.hpp"

namespace flinthills::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumeric = 1;
inline constexpr int kExitUsage = 2;

/// Largest relative drift between the two precisions that still passes.
inline constexpr double kAuditTolerance = 1e-9;

struct AuditReport {
  std::uint64_t n_max;
  int bits;
  int check_bits;
  int required_bits;
  bool certified = false;
  bool passed = false;
  std::string detail;  ///< empty on success
  BigFloat S{128}, S_check{128}, L{128}, L_check{128};
  double rel_diff_S = 0.0;
  double rel_diff_L = 0.0;
};

/// Recomputes S and L at 2*bits. Fails, rather than escalating, when bits is
/// below required_bits(n_max, 8, 32) or any term cannot be certified.
AuditReport audit(std::uint64_t n_max, int bits, unsigned jobs = 1);

/// Executes a validated configuration. Records go to `out`, notes and
/// diagnostics to `err`. Returns 0, 1 (numeric/precision failure) or 2.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_config + run with exit-code mapping.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flinthills::cli

#endif  // FLINTHILLS_CLI_APP_HPP
