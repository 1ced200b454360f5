#ifndef FLINTHILLS_CLI_OUTPUT_HPP
#define FLINTHILLS_CLI_OUTPUT_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "flinthills/big_float.hpp"
#include "flinthills/cli/config.hpp"

namespace flinthills::cli {

/// Significant digits for high-precision sums.
inline constexpr int kHighPrecisionDigits = 40;

struct Field {
  enum class Kind { number, text, null };
  Kind kind = Kind::null;
  std::string text;
};

Field number(double value);  ///< shortest round-trip decimal
Field number(const BigFloat& value);  ///< kHighPrecisionDigits significant digits
Field number(std::uint64_t value);
Field text(std::string value);
Field null_field();
template <class T>
Field optional_number(const std::optional<T>& value) {
  return value ? number(static_cast<std::uint64_t>(*value)) : null_field();
}

/// Shortest decimal that round-trips the double (std::to_chars).
std::string shortest_decimal(double value);

/// Streams records as CSV (header row, RFC 4180 quoting) or JSON lines.
/// Every record must supply the header keys in order.
class RecordWriter {
 public:
  RecordWriter(std::ostream& out, Format format, std::vector<std::string> keys);

  void write(const std::vector<Field>& fields);

 private:
  std::ostream& out_;
  Format format_;
  std::vector<std::string> keys_;
};

}  // namespace flinthills::cli

#endif  // FLINTHILLS_CLI_OUTPUT_HPP
