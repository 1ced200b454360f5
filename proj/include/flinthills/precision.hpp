#ifndef FLINTHILLS_PRECISION_HPP
#define FLINTHILLS_PRECISION_HPP

#include <cstdint>

#include "flinthills/big_float.hpp"
#include "flinthills/errors.hpp"

namespace flinthills {

inline constexpr int kMinBits = 64;
/// Error bounds are carried as doubles; this keeps 2^-bits well inside the
/// double exponent range.
inline constexpr int kMaxBits = 960;
inline constexpr int kDefaultBits = 256;
/// Every certified distance must satisfy d_error < d / 2^20.
inline constexpr int kCertificationShift = 20;

/// Working precision together with a certified approximation of pi.
///
/// Immutable once built; safe to share between threads.
class PrecisionContext {
 public:
  int bits() const noexcept { return bits_; }
  /// pi rounded to `bits` binary digits.
  const BigFloat& pi_value() const noexcept { return pi_value_; }
  /// Certified upper bound on |pi_value - pi|; never above 2^(1-bits).
  double pi_error() const noexcept { return pi_error_; }

 private:
  friend PrecisionContext make_context(int bits);
  PrecisionContext(int bits, BigFloat pi_value, double pi_error)
      : bits_(bits), pi_value_(std::move(pi_value)), pi_error_(pi_error) {}

  int bits_;
  BigFloat pi_value_;
  double pi_error_;
};

/// Builds a context by evaluating Machin's arctangent formula in fixed-point
/// integer arithmetic. Throws std::invalid_argument outside [kMinBits, kMaxBits].
PrecisionContext make_context(int bits);

/// ceil(mu_cap * log2(n_max)) + guard: enough bits to certify d(n) for every
/// n <= n_max when d(n) can be as small as n^(1 - mu_cap).
int required_bits(std::uint64_t n_max, double mu_cap, int guard);

/// n = m*pi + r with |r| minimal, computed against pi_value.
struct Reduction {
  std::uint64_t n;
  std::uint64_t m;
  BigFloat residue;      ///< n - m*pi_value, signed, at context precision
  double residue_error;  ///< bound on |residue - (n - m*pi)|
};

/// Nearest-multiple reduction with separation check against the runner-up
/// candidate. Throws PrecisionError if the minimizer is not certified.
Reduction reduce(std::uint64_t n, const PrecisionContext& ctx);

/// The m minimizing |n - m*pi|.
std::uint64_t nearest_multiple(std::uint64_t n, const PrecisionContext& ctx);

/// d(n) without the sine evaluation.
struct Distance {
  std::uint64_t n;
  std::uint64_t m;
  BigFloat d;
  double d_error;
};

/// Certified d(n) = dist(n, pi*Z). Throws PrecisionError when
/// d_error >= d / 2^20.
Distance distance(std::uint64_t n, const PrecisionContext& ctx);

struct SinValue {
  BigFloat value;
  double error;
};

/// |sin x| for 0 <= x <= pi/2 (plus slack) by Taylor series. `x_error` is the
/// uncertainty already carried by x and is folded into the result bound.
SinValue sin_reduced(const BigFloat& x, double x_error, int bits);

struct DistSample {
  std::uint64_t n;
  std::uint64_t m;
  BigFloat d;
  double d_error;
  BigFloat sin_abs;
  double sin_error;
};

DistSample dist(std::uint64_t n, const PrecisionContext& ctx);

/// |sin n| via the reduced argument n - m*pi.
SinValue sin_abs(std::uint64_t n, const PrecisionContext& ctx);

/// Certified test of value < base^(-exponent) where `value` is known to
/// within `value_error`. Throws PrecisionError (index = base) if the error
/// bounds straddle the threshold.
bool certified_below_power(const BigFloat& value, double value_error, std::uint64_t base, double exponent);

/// Certified test of value >= threshold; throws PrecisionError with `index`
/// when undecidable at the carried precision.
bool certified_at_least(const BigFloat& value, double value_error, double threshold, std::uint64_t index);

}  // namespace flinthills

#endif  // FLINTHILLS_PRECISION_HPP
