#include "flinthills/precision.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace flinthills {
namespace {

// Fixed-point arctan(1/x) scaled by 2^frac_bits. Every stored term is within
// 3 units of the exact scaled term and the truncated tail is below 2 units,
// so the result is within 3*terms + 2 units of the exact value.
struct FixedPointSeries {
  mpz_class value;
  unsigned long error_units;
};

FixedPointSeries arctan_inverse(unsigned long x, unsigned long frac_bits) {
  mpz_class power;
  mpz_ui_pow_ui(power.get_mpz_t(), 2, frac_bits);
  power /= x;
  const unsigned long x_squared = x * x;

  mpz_class sum = power;
  unsigned long terms = 1;
  for (unsigned long k = 1;; ++k) {
    power /= x_squared;
    if (power == 0) break;
    const mpz_class term = power / (2 * k + 1);
    if (k % 2 == 1) {
      sum -= term;
    } else {
      sum += term;
    }
    ++terms;
  }
  return {sum, 3 * terms + 2};
}

// Adds a relative margin so that accumulated double roundings in an error
// bound can only make it larger.
double widen(double bound) { return bound * (1.0 + 0x1p-40); }

void require_n(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("index n must be >= 1");
}

}  // namespace

PrecisionContext make_context(int bits) {
  if (bits < kMinBits || bits > kMaxBits) {
    throw std::invalid_argument("bits must lie in [" + std::to_string(kMinBits) + ", " +
                                std::to_string(kMaxBits) + "], got " + std::to_string(bits));
  }
  const unsigned long frac_bits = static_cast<unsigned long>(bits) + 64;

  // pi = 16 arctan(1/5) - 4 arctan(1/239)
  const FixedPointSeries a5 = arctan_inverse(5, frac_bits);
  const FixedPointSeries a239 = arctan_inverse(239, frac_bits);
  const mpz_class scaled = 16 * a5.value - 4 * a239.value;
  const unsigned long error_units = 16 * a5.error_units + 4 * a239.error_units;

  BigFloat exact(static_cast<mpfr_prec_t>(frac_bits) + 8);
  if (mpfr_set_z_2exp(exact.get(), scaled.get_mpz_t(), -static_cast<long>(frac_bits), MPFR_RNDN) != 0) {
    throw std::logic_error("fixed-point pi did not convert exactly");
  }
  BigFloat pi_value(bits, exact.get(), MPFR_RNDN);

  BigFloat rounding(exact.precision());
  mpfr_sub(rounding.get(), exact.get(), pi_value.get(), MPFR_RNDN);  // exact: pi_value has fewer bits
  mpfr_abs(rounding.get(), rounding.get(), MPFR_RNDN);
  const double pi_error =
      widen(mpfr_get_d(rounding.get(), MPFR_RNDU) + std::ldexp(static_cast<double>(error_units), -static_cast<int>(frac_bits)));

  if (!(pi_error <= std::ldexp(1.0, 1 - bits))) {
    throw std::logic_error("pi error bound exceeds 2^(1-bits) at bits=" + std::to_string(bits));
  }
  return PrecisionContext(bits, std::move(pi_value), pi_error);
}

int required_bits(std::uint64_t n_max, double mu_cap, int guard) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (!(mu_cap >= 2.0)) throw std::invalid_argument("mu_cap must be >= 2");
  if (guard < 16) throw std::invalid_argument("guard must be >= 16");
  return static_cast<int>(std::ceil(mu_cap * std::log2(static_cast<double>(n_max)))) + guard;
}

Reduction reduce(std::uint64_t n, const PrecisionContext& ctx) {
  require_n(n);
  static_assert(sizeof(unsigned long) == sizeof(std::uint64_t), "LP64 platform expected");
  const mpfr_srcptr pi = ctx.pi_value().get();

  BigFloat quotient(128);
  mpfr_ui_div(quotient.get(), n, pi, MPFR_RNDN);
  const std::uint64_t m0 = mpfr_get_ui(quotient.get(), MPFR_RNDD);

  struct Candidate {
    std::uint64_t m;
    BigFloat residue;
  };
  std::array<std::uint64_t, 3> ms{m0 == 0 ? m0 : m0 - 1, m0, m0 + 1};
  const std::size_t first = m0 == 0 ? 1 : 0;

  const mpfr_prec_t product_prec = ctx.bits() + 64;
  const mpfr_prec_t residue_prec = ctx.bits() + 160;
  std::array<Candidate, 3> candidates{Candidate{0, BigFloat(residue_prec)}, Candidate{0, BigFloat(residue_prec)},
                                      Candidate{0, BigFloat(residue_prec)}};
  BigFloat product(product_prec);
  for (std::size_t i = first; i < ms.size(); ++i) {
    candidates[i].m = ms[i];
    const int inexact_mul = mpfr_mul_ui(product.get(), pi, ms[i], MPFR_RNDN);
    const int inexact_sub = mpfr_ui_sub(candidates[i].residue.get(), n, product.get(), MPFR_RNDN);
    if (inexact_mul != 0 || inexact_sub != 0) {
      throw std::logic_error("reduction residue not exact");
    }
  }

  auto best = candidates.begin() + static_cast<std::ptrdiff_t>(first);
  auto runner_up = candidates.end();
  for (auto it = best + 1; it != candidates.end(); ++it) {
    if (mpfr_cmpabs(it->residue.get(), best->residue.get()) < 0) {
      runner_up = best;
      best = it;
    } else if (runner_up == candidates.end() || mpfr_cmpabs(it->residue.get(), runner_up->residue.get()) < 0) {
      runner_up = it;
    }
  }

  // True |n - m*pi| differs from |residue| by at most m*pi_error.
  BigFloat gap(residue_prec);
  BigFloat best_abs(residue_prec);
  mpfr_abs(gap.get(), runner_up->residue.get(), MPFR_RNDN);
  mpfr_abs(best_abs.get(), best->residue.get(), MPFR_RNDN);
  mpfr_sub(gap.get(), gap.get(), best_abs.get(), MPFR_RNDD);
  const double separation_needed =
      widen(static_cast<double>(best->m + runner_up->m) * ctx.pi_error());
  if (!(mpfr_get_d(gap.get(), MPFR_RNDD) > separation_needed)) {
    throw PrecisionError("nearest multiple of pi not certified", n);
  }

  BigFloat residue(ctx.bits());
  const int inexact = mpfr_set(residue.get(), best->residue.get(), MPFR_RNDN);
  const double rounding = inexact == 0 ? 0.0 : std::ldexp(std::fabs(residue.to_double()), -ctx.bits());
  const double residue_error = widen(static_cast<double>(best->m) * ctx.pi_error() + rounding);
  return Reduction{n, best->m, std::move(residue), residue_error};
}

std::uint64_t nearest_multiple(std::uint64_t n, const PrecisionContext& ctx) { return reduce(n, ctx).m; }

Distance distance(std::uint64_t n, const PrecisionContext& ctx) {
  Reduction reduction = reduce(n, ctx);
  mpfr_abs(reduction.residue.get(), reduction.residue.get(), MPFR_RNDN);
  if (reduction.residue.is_zero() ||
      mpfr_cmp_d(reduction.residue.get(), std::ldexp(reduction.residue_error, kCertificationShift)) <= 0) {
    throw PrecisionError("d(n) not certified to relative 2^-20", n);
  }
  return Distance{n, reduction.m, std::move(reduction.residue), reduction.residue_error};
}

SinValue sin_reduced(const BigFloat& x, double x_error, int bits) {
  if (mpfr_sgn(x.get()) < 0 || mpfr_cmp_ui(x.get(), 2) > 0) {
    throw std::invalid_argument("sin_reduced expects 0 <= x <= 2");
  }
  if (x.is_zero()) return SinValue{BigFloat(bits), x_error};

  const mpfr_prec_t work = bits + 32;
  BigFloat sum(work, x.get(), MPFR_RNDN);
  BigFloat term(work, x.get(), MPFR_RNDN);
  BigFloat x_squared(work);
  mpfr_sqr(x_squared.get(), term.get(), MPFR_RNDN);
  BigFloat cutoff(work, x.get(), MPFR_RNDN);
  mpfr_mul_2si(cutoff.get(), cutoff.get(), -static_cast<long>(work) - 4, MPFR_RNDN);

  // Alternating series with decreasing terms while x^2 < 6: the first
  // omitted term bounds the truncation error.
  unsigned long iterations = 0;
  for (unsigned long k = 1;; ++k) {
    mpfr_mul(term.get(), term.get(), x_squared.get(), MPFR_RNDN);
    mpfr_div_ui(term.get(), term.get(), (2 * k) * (2 * k + 1), MPFR_RNDN);
    ++iterations;
    if (mpfr_cmpabs(term.get(), cutoff.get()) < 0) break;
    if (k % 2 == 1) {
      mpfr_sub(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    } else {
      mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    }
  }

  const double x_d = x.to_double(MPFR_RNDU);
  const double truncation = mpfr_get_d(term.get(), MPFR_RNDU);
  const double series_rounding = 8.0 * static_cast<double>(iterations + 1) * std::ldexp(x_d, -static_cast<int>(work));
  BigFloat value(bits, sum.get(), MPFR_RNDN);
  const double final_rounding = std::ldexp(value.to_double(MPFR_RNDU), -bits);
  return SinValue{std::move(value), widen(std::fabs(truncation) + series_rounding + final_rounding + x_error)};
}

DistSample dist(std::uint64_t n, const PrecisionContext& ctx) {
  Distance distance_n = distance(n, ctx);
  SinValue s = sin_reduced(distance_n.d, distance_n.d_error, ctx.bits());
  return DistSample{n, distance_n.m, std::move(distance_n.d), distance_n.d_error, std::move(s.value), s.error};
}

SinValue sin_abs(std::uint64_t n, const PrecisionContext& ctx) {
  const Distance distance_n = distance(n, ctx);
  return sin_reduced(distance_n.d, distance_n.d_error, ctx.bits());
}

bool certified_below_power(const BigFloat& value, double value_error, std::uint64_t base, double exponent) {
  // Fast path in double: std::pow and the conversion each carry well under
  // 1e-12 relative error.
  const double v = value.to_double();
  const double t = std::pow(static_cast<double>(base), -exponent);
  const double slack = 1e-12 * std::max(std::fabs(v), t) + value_error;
  if (std::fabs(v - t) > slack) return v < t;

  BigFloat threshold(256);
  BigFloat power(256, -exponent);
  BigFloat base_f(256);
  mpfr_set_ui(base_f.get(), base, MPFR_RNDN);
  const int pow_inexact = mpfr_pow(threshold.get(), base_f.get(), power.get(), MPFR_RNDN);
  BigFloat gap(std::max<mpfr_prec_t>(256, value.precision()) + 64);
  const int sub_inexact = mpfr_sub(gap.get(), value.get(), threshold.get(), MPFR_RNDN);
  // An exact value against an exactly representable threshold needs no margin.
  if (value_error == 0.0 && pow_inexact == 0 && sub_inexact == 0) return mpfr_sgn(gap.get()) < 0;
  const double margin = widen(value_error + std::ldexp(t, -240));
  if (!(std::fabs(gap.to_double()) > margin)) {
    throw PrecisionError("comparison against n^-exponent not certified", base);
  }
  return mpfr_sgn(gap.get()) < 0;
}

bool certified_at_least(const BigFloat& value, double value_error, double threshold, std::uint64_t index) {
  BigFloat gap(value.precision() + 64);
  const int inexact = mpfr_sub_d(gap.get(), value.get(), threshold, MPFR_RNDN);
  if (value_error == 0.0 && inexact == 0) return mpfr_sgn(gap.get()) >= 0;
  if (!(std::fabs(gap.to_double()) > value_error)) {
    throw PrecisionError("threshold comparison not certified", index);
  }
  return mpfr_sgn(gap.get()) > 0;
}

}  // namespace flinthills
