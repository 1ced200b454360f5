#include "flinthills/big_float.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace flinthills {

BigFloat::BigFloat(mpfr_prec_t precision) {
  mpfr_init2(value_, precision);
  mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(mpfr_prec_t precision, double value) {
  mpfr_init2(value_, precision);
  mpfr_set_d(value_, value, MPFR_RNDN);
}

BigFloat::BigFloat(mpfr_prec_t precision, mpfr_srcptr value, mpfr_rnd_t rnd) {
  mpfr_init2(value_, precision);
  mpfr_set(value_, value, rnd);
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  mpfr_swap(value_, other.value_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

std::string BigFloat::to_decimal(int digits) const {
  char* raw = nullptr;
  if (mpfr_asprintf(&raw, "%.*Rg", digits, value_) < 0) {
    throw std::runtime_error("mpfr_asprintf failed");
  }
  std::string text(raw);
  mpfr_free_str(raw);
  return text;
}

BigFloat BigFloat::from_decimal(std::string_view text, mpfr_prec_t precision) {
  BigFloat result(precision);
  const std::string owned(text);
  char* end = nullptr;
  mpfr_strtofr(result.value_, owned.c_str(), &end, 10, MPFR_RNDN);
  if (owned.empty() || end != owned.c_str() + owned.size() || mpfr_nan_p(result.value_)) {
    throw std::invalid_argument("malformed decimal: '" + owned + "'");
  }
  return result;
}

std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b) {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.value_, b.value_);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

std::partial_ordering operator<=>(const BigFloat& a, double b) {
  if (mpfr_nan_p(a.value_) || std::isnan(b)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp_d(a.value_, b);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

int round_trip_digits(mpfr_prec_t precision) {
  return 1 + static_cast<int>(std::ceil(static_cast<double>(precision) * std::log10(2.0)));
}

}  // namespace flinthills
