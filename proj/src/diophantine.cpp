#include "flinthills/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "flinthills/parallel.hpp"

namespace flinthills {
namespace {

mpq_class to_rational(const BigFloat& value) {
  mpz_class mantissa;
  const mpfr_exp_t exponent = mpfr_get_z_2exp(mantissa.get_mpz_t(), value.get());
  mpq_class result(mantissa);
  if (exponent >= 0) {
    mpq_mul_2exp(result.get_mpq_t(), result.get_mpq_t(), static_cast<mp_bitcnt_t>(exponent));
  } else {
    mpq_div_2exp(result.get_mpq_t(), result.get_mpq_t(), static_cast<mp_bitcnt_t>(-exponent));
  }
  return result;
}

mpz_class floor_of(const mpq_class& x) {
  mpz_class result;
  mpz_fdiv_q(result.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return result;
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(name) + " must be a positive finite number");
  }
}

}  // namespace

CfExpansion cf_expand(const PrecisionContext& ctx, std::size_t k_max) {
  const mpq_class centre = to_rational(ctx.pi_value());
  const mpq_class radius(ctx.pi_error());  // doubles convert exactly
  mpq_class lo = centre - radius;
  mpq_class hi = centre + radius;

  CfExpansion expansion;
  for (std::size_t k = 0; k <= k_max; ++k) {
    const mpz_class a = floor_of(lo);
    if (floor_of(hi) != a) {
      break;
    }
    expansion.quotients.push_back(a);
    if (lo == a || hi == a) {
      break;  // remainder interval unbounded
    }
    if (k == k_max) break;
    // x -> 1/(x - a) is decreasing, so the endpoints swap.
    mpq_class next_lo = 1 / (hi - a);
    mpq_class next_hi = 1 / (lo - a);
    lo = std::move(next_lo);
    hi = std::move(next_hi);
  }
  expansion.stopped_early = expansion.quotients.size() < k_max + 1;
  return expansion;
}

ConvergentList convergents(const PrecisionContext& ctx, std::size_t k_max) {
  const CfExpansion expansion = cf_expand(ctx, k_max);
  ConvergentList list;
  list.stopped_early = expansion.stopped_early;

  mpz_class p_prev2 = 0, p_prev1 = 1;
  mpz_class q_prev2 = 1, q_prev1 = 0;
  for (std::size_t k = 0; k < expansion.quotients.size(); ++k) {
    const mpz_class& a = expansion.quotients[k];
    mpz_class p = a * p_prev1 + p_prev2;
    mpz_class q = a * q_prev1 + q_prev2;

    // q*pi_value and its difference with p are exact at this precision.
    const mpfr_prec_t prec = ctx.bits() + static_cast<mpfr_prec_t>(mpz_sizeinbase(q.get_mpz_t(), 2)) +
                             static_cast<mpfr_prec_t>(mpz_sizeinbase(p.get_mpz_t(), 2)) + 8;
    BigFloat diff(prec);
    mpfr_mul_z(diff.get(), ctx.pi_value().get(), q.get_mpz_t(), MPFR_RNDN);
    mpfr_sub_z(diff.get(), diff.get(), p.get_mpz_t(), MPFR_RNDN);
    mpfr_abs(diff.get(), diff.get(), MPFR_RNDN);
    const double eps = diff.to_double();
    const double eps_error =
        (q.get_d() * ctx.pi_error() + std::fabs(eps) * std::numeric_limits<double>::epsilon()) * (1.0 + 0x1p-40);

    list.items.push_back(Convergent{k, a, p, q, eps, eps_error});
    p_prev2 = std::exchange(p_prev1, std::move(p));
    q_prev2 = std::exchange(q_prev1, std::move(q));
  }
  return list;
}

GoodApproxSet good_denominators(double nu, std::uint64_t n_max, const PrecisionContext& ctx, unsigned jobs) {
  require_positive(nu, "nu");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (n_max > (std::uint64_t{1} << 60)) throw std::invalid_argument("n_max too large");

  GoodApproxSet set{nu, n_max, {}};
  for_each_chunk(
      1, n_max, jobs,
      [&](IndexRange range) {
        std::vector<GoodApprox> found;
        BigFloat product(ctx.bits() + 64);
        BigFloat err(ctx.bits() + 64);
        for (std::uint64_t q = range.first; q <= range.last; ++q) {
          mpfr_mul_ui(product.get(), ctx.pi_value().get(), q, MPFR_RNDN);  // exact
          const std::int64_t p = mpfr_get_si(product.get(), MPFR_RNDNA);
          mpfr_sub_si(err.get(), product.get(), p, MPFR_RNDN);  // exact
          mpfr_abs(err.get(), err.get(), MPFR_RNDN);
          const double err_bound = static_cast<double>(q) * ctx.pi_error() * (1.0 + 0x1p-40);
          if (certified_below_power(err, err_bound, q, nu)) {
            found.push_back({q, p, err.to_double()});
          }
        }
        return found;
      },
      [&](IndexRange, std::vector<GoodApprox> found) {
        set.members.insert(set.members.end(), found.begin(), found.end());
      });
  return set;
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Converges:
      return "Converges";
    case Verdict::Diverges:
      return "Diverges";
    case Verdict::Undecided:
      return "Undecided";
  }
  return "Undecided";
}

CriterionVerdict classify_mu(double mu) {
  if (!(mu >= 2.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("irrationality exponent mu must be >= 2");
  }
  Verdict verdict = Verdict::Undecided;
  if (mu < kMuLowerThreshold) {
    verdict = Verdict::Converges;
  } else if (mu > kMuUpperThreshold) {
    verdict = Verdict::Diverges;
  }
  return CriterionVerdict{mu, verdict};
}

double kappa(std::uint64_t n, const PrecisionContext& ctx) {
  if (n < 2) throw std::invalid_argument("kappa(n) needs n >= 2");
  const Distance dn = distance(n, ctx);
  BigFloat log_d(128);
  mpfr_log(log_d.get(), dn.d.get(), MPFR_RNDN);
  return -log_d.to_double() / std::log(static_cast<double>(n));
}

ExponentProbe exponent_probe(std::uint64_t n_max, const PrecisionContext& ctx, unsigned jobs) {
  if (n_max < 2) throw std::invalid_argument("exponent_probe needs n_max >= 2");
  ExponentProbe probe{-std::numeric_limits<double>::infinity(), 0, {}};
  for_each_chunk(
      2, n_max, jobs,
      [&](IndexRange range) {
        // Records local to the chunk; the merge step filters them against
        // the global record.
        std::vector<KappaRecord> records;
        double best = -std::numeric_limits<double>::infinity();
        for (std::uint64_t n = range.first; n <= range.last; ++n) {
          const double value = kappa(n, ctx);
          if (value > best) {
            best = value;
            records.push_back({n, value});
          }
        }
        return records;
      },
      [&](IndexRange, std::vector<KappaRecord> records) {
        for (const KappaRecord& record : records) {
          if (record.kappa > probe.kappa_max) {
            probe.kappa_max = record.kappa;
            probe.argmax_n = record.n;
            probe.table.push_back(record);
          }
        }
      });
  return probe;
}

std::vector<std::uint64_t> decade_checkpoints(std::uint64_t n_max) {
  std::vector<std::uint64_t> points;
  for (std::uint64_t p = 1; p <= n_max; p *= 10) {
    points.push_back(p);
    if (p > std::numeric_limits<std::uint64_t>::max() / 10) break;
  }
  if (points.empty() || points.back() != n_max) points.push_back(n_max);
  return points;
}

std::vector<SparsityPoint> sparsity_count(double nu, std::uint64_t n_max, const PrecisionContext& ctx,
                                          unsigned jobs) {
  require_positive(nu, "nu");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");

  std::vector<std::uint64_t> hits;
  for_each_chunk(
      1, n_max, jobs,
      [&](IndexRange range) {
        std::vector<std::uint64_t> local;
        for (std::uint64_t n = range.first; n <= range.last; ++n) {
          const Distance dn = distance(n, ctx);
          if (certified_below_power(dn.d, dn.d_error, n, nu)) local.push_back(n);
        }
        return local;
      },
      [&](IndexRange, std::vector<std::uint64_t> local) { hits.insert(hits.end(), local.begin(), local.end()); });

  std::vector<SparsityPoint> points;
  for (const std::uint64_t checkpoint : decade_checkpoints(n_max)) {
    const auto count = static_cast<std::uint64_t>(std::upper_bound(hits.begin(), hits.end(), checkpoint) - hits.begin());
    points.push_back({checkpoint, count});
  }
  return points;
}

}  // namespace flinthills
