#ifndef FLINTHILLS_ERRORS_HPP
#define FLINTHILLS_ERRORS_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace flinthills {

/// Raised when the working precision cannot certify a result. Carries the
/// offending index when there is one.
class PrecisionError : public std::runtime_error {
 public:
  explicit PrecisionError(const std::string& what, std::optional<std::uint64_t> index = std::nullopt)
      : std::runtime_error(index ? what + " (n=" + std::to_string(*index) + ")" : what), index_(index) {}

  std::optional<std::uint64_t> index() const noexcept { return index_; }

 private:
  std::optional<std::uint64_t> index_;
};

/// A block window that contains no integer.
class EmptyWindowError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace flinthills

#endif  // FLINTHILLS_ERRORS_HPP
