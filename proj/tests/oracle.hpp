// Independent reference computations used by the tests. Everything here goes
// through MPFR's own pi and sin at a caller-chosen precision, with a plain
// sequential loop and no error tracking.
#ifndef FLINTHILLS_TESTS_ORACLE_HPP
#define FLINTHILLS_TESTS_ORACLE_HPP

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "flinthills/big_float.hpp"

namespace oracle {

using flinthills::BigFloat;

inline BigFloat pi(mpfr_prec_t prec) {
  BigFloat out(prec);
  mpfr_const_pi(out.get(), MPFR_RNDN);
  return out;
}

/// Nearest multiple by scanning every m in 0..n.
inline std::uint64_t nearest_multiple_scan(std::uint64_t n, const BigFloat& pi_ref) {
  const mpfr_prec_t prec = pi_ref.precision();
  BigFloat best(prec), r(prec);
  std::uint64_t best_m = 0;
  mpfr_set_ui(best.get(), n, MPFR_RNDN);
  for (std::uint64_t m = 1; m <= n; ++m) {
    mpfr_mul_ui(r.get(), pi_ref.get(), m, MPFR_RNDN);
    mpfr_ui_sub(r.get(), n, r.get(), MPFR_RNDN);
    mpfr_abs(r.get(), r.get(), MPFR_RNDN);
    if (mpfr_less_p(r.get(), best.get())) {
      mpfr_set(best.get(), r.get(), MPFR_RNDN);
      best_m = m;
    }
  }
  return best_m;
}

inline BigFloat dist(std::uint64_t n, const BigFloat& pi_ref) {
  const mpfr_prec_t prec = pi_ref.precision();
  BigFloat q(prec), d(prec);
  mpfr_ui_div(q.get(), n, pi_ref.get(), MPFR_RNDN);
  mpfr_round(q.get(), q.get());
  mpfr_mul(d.get(), q.get(), pi_ref.get(), MPFR_RNDN);
  mpfr_ui_sub(d.get(), n, d.get(), MPFR_RNDN);
  mpfr_abs(d.get(), d.get(), MPFR_RNDN);
  return d;
}

inline BigFloat abs_sin(std::uint64_t n, mpfr_prec_t prec) {
  BigFloat x(prec), s(prec);
  mpfr_set_ui(x.get(), n, MPFR_RNDN);
  mpfr_sin(s.get(), x.get(), MPFR_RNDN);
  mpfr_abs(s.get(), s.get(), MPFR_RNDN);
  return s;
}

/// 1 / (n^a * base^b)
inline BigFloat inverse_term(std::uint64_t n, double a, const BigFloat& base, double b) {
  const mpfr_prec_t prec = base.precision();
  BigFloat na(prec), bb(prec), e(prec);
  mpfr_set_ui(na.get(), n, MPFR_RNDN);
  mpfr_set_d(e.get(), a, MPFR_RNDN);
  mpfr_pow(na.get(), na.get(), e.get(), MPFR_RNDN);
  mpfr_set_d(e.get(), b, MPFR_RNDN);
  mpfr_pow(bb.get(), base.get(), e.get(), MPFR_RNDN);
  mpfr_mul(na.get(), na.get(), bb.get(), MPFR_RNDN);
  mpfr_ui_div(na.get(), 1, na.get(), MPFR_RNDN);
  return na;
}

inline BigFloat B(const BigFloat& x, const BigFloat& pi_ref) {
  const mpfr_prec_t prec = x.precision();
  BigFloat out(prec);
  if (mpfr_cmp_ui(x.get(), 1) <= 0) {
    BigFloat cube(prec);
    mpfr_pow_ui(cube.get(), x.get(), 3, MPFR_RNDN);
    mpfr_div_ui(cube.get(), cube.get(), 6, MPFR_RNDN);
    mpfr_sub(out.get(), x.get(), cube.get(), MPFR_RNDN);
  } else {
    mpfr_mul_ui(out.get(), x.get(), 2, MPFR_RNDN);
    mpfr_div(out.get(), out.get(), pi_ref.get(), MPFR_RNDN);
  }
  return out;
}

struct Sums {
  BigFloat S, L, G_sharp, G;
};

/// S, L, G# and G = (pi/2)^2 L for exponent a on n, summed naively.
inline Sums sums(std::uint64_t n_max, double a, mpfr_prec_t prec) {
  const BigFloat pi_ref = pi(prec);
  Sums out{BigFloat(prec), BigFloat(prec), BigFloat(prec), BigFloat(prec)};
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const BigFloat d = dist(n, pi_ref);
    mpfr_add(out.S.get(), out.S.get(), inverse_term(n, a, abs_sin(n, prec), 2.0).get(), MPFR_RNDN);
    mpfr_add(out.L.get(), out.L.get(), inverse_term(n, a, d, 2.0).get(), MPFR_RNDN);
    mpfr_add(out.G_sharp.get(), out.G_sharp.get(), inverse_term(n, a, B(d, pi_ref), 2.0).get(), MPFR_RNDN);
  }
  BigFloat factor(prec);
  mpfr_div_ui(factor.get(), pi_ref.get(), 2, MPFR_RNDN);
  mpfr_sqr(factor.get(), factor.get(), MPFR_RNDN);
  mpfr_mul(out.G.get(), out.L.get(), factor.get(), MPFR_RNDN);
  return out;
}

inline BigFloat generalized(std::uint64_t n_max, double a, double b, mpfr_prec_t prec) {
  BigFloat total(prec);
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    mpfr_add(total.get(), total.get(), inverse_term(n, a, abs_sin(n, prec), b).get(), MPFR_RNDN);
  }
  return total;
}

/// Continued fraction of the (rational) value of x, first count quotients.
inline std::vector<mpz_class> continued_fraction(const BigFloat& x, std::size_t count) {
  mpq_class r;
  mpz_class mant;
  const mpfr_exp_t exp = mpfr_get_z_2exp(mant.get_mpz_t(), x.get());
  if (exp >= 0) {
    r = mpq_class(mant << static_cast<unsigned long>(exp));
  } else {
    r = mpq_class(mant, mpz_class(1) << static_cast<unsigned long>(-exp));
  }
  r.canonicalize();
  std::vector<mpz_class> out;
  for (std::size_t i = 0; i < count; ++i) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    out.push_back(a);
    r -= a;
    if (r == 0) break;
    r = 1 / r;
  }
  return out;
}

/// |a - b| / |b|
inline double rel_diff(const BigFloat& a, const BigFloat& b) {
  BigFloat diff(std::max(a.precision(), b.precision()));
  mpfr_sub(diff.get(), a.get(), b.get(), MPFR_RNDN);
  mpfr_div(diff.get(), diff.get(), b.get(), MPFR_RNDN);
  return std::abs(diff.to_double());
}

}  // namespace oracle

#endif  // FLINTHILLS_TESTS_ORACLE_HPP
