#ifndef FLINTHILLS_BIG_FLOAT_HPP
#define FLINTHILLS_BIG_FLOAT_HPP

#include <mpfr.h>

#include <compare>
#include <string>
#include <string_view>

namespace flinthills {

/// Owning RAII holder for an MPFR value with a fixed precision.
///
/// Copies keep the source precision. Moved-from objects stay valid at
/// MPFR_PREC_MIN and may be reassigned.
class BigFloat {
 public:
  /// Zero at the given precision.
  explicit BigFloat(mpfr_prec_t precision);
  BigFloat(mpfr_prec_t precision, double value);
  BigFloat(mpfr_prec_t precision, mpfr_srcptr value, mpfr_rnd_t rnd = MPFR_RNDN);

  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  mpfr_ptr get() noexcept { return value_; }
  mpfr_srcptr get() const noexcept { return value_; }
  mpfr_prec_t precision() const noexcept { return mpfr_get_prec(value_); }

  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(value_, rnd); }
  bool is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }

  /// Decimal text with `digits` significant digits, trailing zeros removed
  /// ("%.<digits>Rg"). Deterministic and locale independent.
  std::string to_decimal(int digits) const;

  /// Parses decimal text into a value of the given precision (round to
  /// nearest). Throws std::invalid_argument on malformed input.
  static BigFloat from_decimal(std::string_view text, mpfr_prec_t precision);

  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
  friend std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b);
  friend std::partial_ordering operator<=>(const BigFloat& a, double b);
  friend bool operator==(const BigFloat& a, double b) { return mpfr_cmp_d(a.value_, b) == 0 && !mpfr_nan_p(a.value_); }

 private:
  mpfr_t value_;
};

/// Number of decimal digits that round-trip any value of `precision` bits.
int round_trip_digits(mpfr_prec_t precision);

}  // namespace flinthills

#endif  // FLINTHILLS_BIG_FLOAT_HPP
