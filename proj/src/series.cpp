#include "flinthills/series.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "flinthills/parallel.hpp"

namespace flinthills {
namespace {

constexpr double kWiden = 1.0 + 0x1p-40;
// Accumulation bound for a Neumaier sum of positive terms at kTermBits
// (2u|S| plus the final sum+compensation rounding, with room to spare).
constexpr int kAccumulationShift = 124;

double accumulation_error(const BigFloat& value) {
  return std::ldexp(std::fabs(value.to_double(MPFR_RNDU)), -kAccumulationShift);
}

BigFloat half_pi_power(const PrecisionContext& ctx, double b) {
  BigFloat half_pi(ctx.bits());
  mpfr_div_2ui(half_pi.get(), ctx.pi_value().get(), 1, MPFR_RNDN);
  BigFloat exponent(64, b);
  BigFloat result(kTermBits);
  mpfr_pow(result.get(), half_pi.get(), exponent.get(), MPFR_RNDN);
  return result;
}

BigFloat pi_squared_over_four(const PrecisionContext& ctx) { return half_pi_power(ctx, 2.0); }

void require_n_max(std::uint64_t n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
}

// One chunk's contribution to the three prefix sums.
struct Partial {
  CompensatedSum S, L, G_sharp;
  double S_error = 0.0, L_error = 0.0, G_sharp_error = 0.0;
};

struct Snapshot {
  std::uint64_t n;
  Partial partial;
};

struct ChunkResult {
  Partial total;
  MaxTerm max_term;
  std::vector<Snapshot> snapshots;
};

LedgerRow make_row(const SumLedger& base, const Partial* partial, std::uint64_t n) {
  CompensatedSum S = base.S_sum;
  CompensatedSum L = base.L_sum;
  CompensatedSum G_sharp = base.G_sharp_sum;
  double S_error = base.S_term_error, L_error = base.L_term_error, G_sharp_error = base.G_sharp_term_error;
  if (partial != nullptr) {
    S.add(partial->S);
    L.add(partial->L);
    G_sharp.add(partial->G_sharp);
    S_error += partial->S_error;
    L_error += partial->L_error;
    G_sharp_error += partial->G_sharp_error;
  }
  LedgerRow row{n,
                S.value(),
                L.value(),
                BigFloat(kTermBits),
                G_sharp.value(),
                BigFloat(kTermBits),
                BigFloat(kTermBits),
                0.0,
                0.0,
                0.0};
  mpfr_mul(row.G.get(), base.g_factor.get(), row.L.get(), MPFR_RNDN);
  mpfr_div(row.ratio_SL.get(), row.S.get(), row.L.get(), MPFR_RNDN);
  mpfr_div(row.ratio_SG.get(), row.S.get(), row.G.get(), MPFR_RNDN);
  row.S_error = S_error + accumulation_error(row.S);
  row.L_error = L_error + accumulation_error(row.L);
  row.G_sharp_error = G_sharp_error + accumulation_error(row.G_sharp);
  return row;
}

}  // namespace

Term inverse_power_term(std::uint64_t n, double a, const BigFloat& base, double base_error, double b) {
  if (mpfr_sgn(base.get()) <= 0) throw PrecisionError("non-positive base in series term", n);
  const double relative_base = base_error / base.to_double(MPFR_RNDD);
  if (!(relative_base < 1.0)) throw PrecisionError("series term base not certified", n);

  BigFloat a_exp(64, a);
  BigFloat b_exp(64, b);
  BigFloat power(kTermBits);
  BigFloat base_power(kTermBits);
  mpfr_ui_pow(power.get(), n, a_exp.get(), MPFR_RNDN);
  mpfr_pow(base_power.get(), base.get(), b_exp.get(), MPFR_RNDN);
  mpfr_mul(power.get(), power.get(), base_power.get(), MPFR_RNDN);
  BigFloat value(kTermBits);
  mpfr_ui_div(value.get(), 1, power.get(), MPFR_RNDN);

  // base^-b moves by at most (1 - r)^-|b| - 1 relative; four roundings add
  // a few units of 2^-128.
  const double relative = std::expm1(-std::fabs(b) * std::log1p(-relative_base)) * kWiden + 0x1p-124;
  const double error = value.to_double(MPFR_RNDU) * relative * kWiden;
  return Term{std::move(value), error};
}

Term term_S(std::uint64_t n, const PrecisionContext& ctx) {
  const SinValue s = sin_abs(n, ctx);
  return inverse_power_term(n, 3.0, s.value, s.error, 2.0);
}

Term term_L(std::uint64_t n, const PrecisionContext& ctx) {
  const Distance dn = distance(n, ctx);
  return inverse_power_term(n, 3.0, dn.d, dn.d_error, 2.0);
}

double B_bound(double x) {
  if (!(x >= 0.0 && x <= kHalfPi)) throw std::invalid_argument("B_bound expects 0 <= x <= pi/2");
  if (x <= 1.0) return x - x * x * x / 6.0;
  return 2.0 / std::numbers::pi * x;
}

BigFloat B_bound(const BigFloat& x, const BigFloat& pi) {
  const mpfr_prec_t prec = x.precision();
  BigFloat result(prec);
  if (mpfr_cmp_ui(x.get(), 1) <= 0) {
    mpfr_pow_ui(result.get(), x.get(), 3, MPFR_RNDN);
    mpfr_div_ui(result.get(), result.get(), 6, MPFR_RNDN);
    mpfr_sub(result.get(), x.get(), result.get(), MPFR_RNDN);
  } else {
    mpfr_mul_2ui(result.get(), x.get(), 1, MPFR_RNDN);
    mpfr_div(result.get(), result.get(), pi.get(), MPFR_RNDN);
  }
  return result;
}

CompensatedSum::CompensatedSum() : sum_(kTermBits), compensation_(kTermBits) {}

CompensatedSum::CompensatedSum(BigFloat sum, BigFloat compensation)
    : sum_(kTermBits, sum.get()), compensation_(kTermBits, compensation.get()) {}

void CompensatedSum::add(const BigFloat& x) {
  BigFloat total(kTermBits);
  mpfr_add(total.get(), sum_.get(), x.get(), MPFR_RNDN);
  BigFloat lost(kTermBits);
  if (mpfr_cmpabs(sum_.get(), x.get()) >= 0) {
    mpfr_sub(lost.get(), sum_.get(), total.get(), MPFR_RNDN);
    mpfr_add(lost.get(), lost.get(), x.get(), MPFR_RNDN);
  } else {
    mpfr_sub(lost.get(), x.get(), total.get(), MPFR_RNDN);
    mpfr_add(lost.get(), lost.get(), sum_.get(), MPFR_RNDN);
  }
  mpfr_add(compensation_.get(), compensation_.get(), lost.get(), MPFR_RNDN);
  sum_ = std::move(total);
}

void CompensatedSum::add(const CompensatedSum& other) {
  add(other.sum_);
  add(other.compensation_);
}

BigFloat CompensatedSum::value() const {
  BigFloat result(kTermBits);
  mpfr_add(result.get(), sum_.get(), compensation_.get(), MPFR_RNDN);
  return result;
}

void SeriesParams::validate() const {
  if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("a must be >= 0");
  if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("b must be >= 0");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be >= 0");
  if (!(delta > 0.0 && delta <= kHalfPi)) throw std::invalid_argument("delta must lie in (0, pi/2]");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be > 0");
}

BigFloat SumLedger::G() const {
  BigFloat result(kTermBits);
  const BigFloat l = L();
  mpfr_mul(result.get(), g_factor.get(), l.get(), MPFR_RNDN);
  return result;
}

double SumLedger::S_error() const { return S_term_error + accumulation_error(S()); }
double SumLedger::L_error() const { return L_term_error + accumulation_error(L()); }
double SumLedger::G_sharp_error() const { return G_sharp_term_error + accumulation_error(G_sharp()); }

bool is_regular_checkpoint(std::uint64_t n, std::uint64_t stride) {
  if (stride != 0 && n % stride == 0) return true;
  std::uint64_t p = 1;
  while (p < n && p <= std::numeric_limits<std::uint64_t>::max() / 10) p *= 10;
  return p == n;
}

SumLedger partial_sums(std::uint64_t n_max, const SeriesParams& params, const PrecisionContext& ctx,
                       std::uint64_t stride, const SumOptions& options) {
  require_n_max(n_max);
  params.validate();
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");

  SumLedger ledger;
  if (options.resume != nullptr) {
    const SumLedger& from = *options.resume;
    if (from.n_done % kChunkLength != 0 || from.n_done > n_max) {
      throw std::invalid_argument("resume point must be a chunk boundary not beyond n_max");
    }
    if (from.params.a != params.a || from.params.b != params.b || from.params.eta != params.eta) {
      throw std::invalid_argument("resume ledger was built with different series exponents");
    }
    ledger = from;
    if (!options.keep_rows) ledger.checkpoints.clear();
    if (options.on_row) {
      for (const LedgerRow& row : from.checkpoints) options.on_row(row);
    }
  } else {
    ledger.params = params;
  }
  ledger.g_factor = half_pi_power(ctx, params.b);

  const double exponent_n = params.a + params.eta;
  const double exponent_sin = params.b;

  auto compute = [&](IndexRange range) {
    ChunkResult result;
    for (std::uint64_t n = range.first; n <= range.last; ++n) {
      const DistSample sample = dist(n, ctx);
      Term s = inverse_power_term(n, exponent_n, sample.sin_abs, sample.sin_error, exponent_sin);
      Term l = inverse_power_term(n, exponent_n, sample.d, sample.d_error, exponent_sin);
      // B has slope at most 1 on its domain, so its error is that of d plus
      // rounding at context precision.
      const BigFloat lower = B_bound(sample.d, ctx.pi_value());
      const double lower_error =
          (sample.d_error + std::ldexp(lower.to_double(MPFR_RNDU), 3 - ctx.bits())) * kWiden;
      Term g = inverse_power_term(n, exponent_n, lower, lower_error, exponent_sin);

      if (result.max_term.n == 0 || s.value > result.max_term.value) {
        result.max_term.n = n;
        result.max_term.value = s.value;
      }
      Partial& total = result.total;
      total.S.add(s.value);
      total.L.add(l.value);
      total.G_sharp.add(g.value);
      total.S_error += s.error;
      total.L_error += l.error;
      total.G_sharp_error += g.error;
      if (is_regular_checkpoint(n, stride) || n == n_max) {
        result.snapshots.push_back(Snapshot{n, total});
      }
    }
    return result;
  };

  auto merge = [&](IndexRange range, ChunkResult result) {
    for (const Snapshot& snapshot : result.snapshots) {
      if (!is_regular_checkpoint(snapshot.n, stride)) continue;  // the final row is added last
      LedgerRow row = make_row(ledger, &snapshot.partial, snapshot.n);
      if (options.on_row) options.on_row(row);
      if (options.keep_rows) ledger.checkpoints.push_back(std::move(row));
    }
    ledger.S_sum.add(result.total.S);
    ledger.L_sum.add(result.total.L);
    ledger.G_sharp_sum.add(result.total.G_sharp);
    ledger.S_term_error += result.total.S_error;
    ledger.L_term_error += result.total.L_error;
    ledger.G_sharp_term_error += result.total.G_sharp_error;
    if (ledger.max_term.n == 0 || result.max_term.value > ledger.max_term.value) {
      ledger.max_term = result.max_term;
    }
    ledger.n_done = range.last;
    if (range.last % kChunkLength == 0 && options.on_chunk_boundary) options.on_chunk_boundary(ledger);
  };

  if (ledger.n_done < n_max) {
    for_each_chunk(ledger.n_done + 1, n_max, options.jobs, compute, merge);
  }

  if (!is_regular_checkpoint(n_max, stride)) {
    LedgerRow row = make_row(ledger, nullptr, n_max);
    if (options.on_row) options.on_row(row);
    if (options.keep_rows) ledger.checkpoints.push_back(std::move(row));
  }
  return ledger;
}

Zeta3 zeta3(const PrecisionContext& ctx) {
  // zeta(3) = 5/2 * sum_{k>=1} (-1)^(k+1) / (k^3 C(2k,k)); the terms decrease
  // so the first omitted one bounds the tail.
  const mpfr_prec_t work = ctx.bits() + 32;
  BigFloat sum(work);
  BigFloat term(work);
  BigFloat cutoff(work);
  mpfr_set_ui_2exp(cutoff.get(), 1, -static_cast<mpfr_exp_t>(work) - 2, MPFR_RNDN);
  mpz_class binomial = 1;
  mpz_class denominator;
  unsigned long terms = 0;
  for (unsigned long k = 1;; ++k) {
    binomial = binomial * (2 * k) * (2 * k - 1) / (k * k);
    denominator = binomial * k * k * k;
    mpfr_set_z(term.get(), denominator.get_mpz_t(), MPFR_RNDN);
    mpfr_ui_div(term.get(), 1, term.get(), MPFR_RNDN);
    if (mpfr_cmp(term.get(), cutoff.get()) < 0) break;
    if (k % 2 == 1) {
      mpfr_add(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    } else {
      mpfr_sub(sum.get(), sum.get(), term.get(), MPFR_RNDN);
    }
    ++terms;
  }
  const double truncation = term.to_double(MPFR_RNDU);
  mpfr_mul_ui(sum.get(), sum.get(), 5, MPFR_RNDN);
  mpfr_div_2ui(sum.get(), sum.get(), 1, MPFR_RNDN);
  BigFloat value(ctx.bits(), sum.get(), MPFR_RNDN);
  const double rounding = std::ldexp(4.0 * static_cast<double>(terms + 2), -static_cast<int>(work)) +
                          std::ldexp(value.to_double(MPFR_RNDU), -ctx.bits());
  return Zeta3{std::move(value), (2.5 * truncation + 2.5 * rounding) * kWiden};
}

SafeRegionReport safe_region_sum(double delta, std::uint64_t n_max, const PrecisionContext& ctx, unsigned jobs) {
  if (!(delta > 0.0 && delta <= kHalfPi)) throw std::invalid_argument("delta must lie in (0, pi/2]");
  require_n_max(n_max);

  struct Local {
    CompensatedSum sum;
    double error = 0.0;
    std::uint64_t count = 0;
  };
  Local total;
  for_each_chunk(
      1, n_max, jobs,
      [&](IndexRange range) {
        Local local;
        for (std::uint64_t n = range.first; n <= range.last; ++n) {
          const Distance dn = distance(n, ctx);
          if (!certified_at_least(dn.d, dn.d_error, delta, n)) continue;
          const SinValue s = sin_reduced(dn.d, dn.d_error, ctx.bits());
          const Term t = inverse_power_term(n, 3.0, s.value, s.error, 2.0);
          local.sum.add(t.value);
          local.error += t.error;
          ++local.count;
        }
        return local;
      },
      [&](IndexRange, Local local) {
        total.sum.add(local.sum);
        total.error += local.error;
        total.count += local.count;
      });

  BigFloat bound = pi_squared_over_four(ctx);
  const Zeta3 z = zeta3(ctx);
  mpfr_mul(bound.get(), bound.get(), z.value.get(), MPFR_RNDN);
  BigFloat delta_squared(kTermBits, delta);
  mpfr_sqr(delta_squared.get(), delta_squared.get(), MPFR_RNDN);
  mpfr_div(bound.get(), bound.get(), delta_squared.get(), MPFR_RNDN);

  const BigFloat sum = total.sum.value();
  return SafeRegionReport{delta,
                          n_max,
                          sum.to_double(),
                          total.error + accumulation_error(sum),
                          bound.to_double(),
                          total.count};
}

WeightedReport weighted_sum(double eta, std::uint64_t n_max, const PrecisionContext& ctx, unsigned jobs) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be > 0");
  require_n_max(n_max);

  SeriesParams params;
  params.eta = eta;
  SumOptions options;
  options.jobs = jobs;
  const SumLedger ledger = partial_sums(n_max, params, ctx, n_max, options);
  const std::vector<SparsityPoint> counts = sparsity_count(1.0 + eta / 4.0, n_max, ctx, jobs);

  WeightedReport report{eta, ledger.S(), ledger.S_error(), {}};
  // Both lists hold exactly the decade checkpoints plus n_max.
  for (std::size_t i = 0; i < counts.size() && i < ledger.checkpoints.size(); ++i) {
    report.checkpoints.push_back(WeightedPoint{counts[i].n, ledger.checkpoints[i].S, counts[i].count});
  }
  return report;
}

Term generalized_sum(double a, double b, std::uint64_t n_max, const PrecisionContext& ctx, unsigned jobs) {
  SeriesParams params;
  params.a = a;
  params.b = b;
  SumOptions options;
  options.jobs = jobs;
  options.keep_rows = false;
  const SumLedger ledger = partial_sums(n_max, params, ctx, n_max, options);
  return Term{ledger.S(), ledger.S_error()};
}

SplitReport adaptive_split(double alpha, std::uint64_t n_max, const PrecisionContext& ctx, unsigned jobs) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be > 0");
  require_n_max(n_max);

  struct Local {
    CompensatedSum bulk, spike;
    std::vector<std::uint64_t> small;
  };
  Local total;
  BigFloat bulk_exponent(64, 2.0 * alpha - 3.0);
  for_each_chunk(
      1, n_max, jobs,
      [&](IndexRange range) {
        Local local;
        BigFloat power(kTermBits);
        for (std::uint64_t n = range.first; n <= range.last; ++n) {
          const Distance dn = distance(n, ctx);
          if (certified_below_power(dn.d, dn.d_error, n, alpha)) {
            local.small.push_back(n);
            local.spike.add(inverse_power_term(n, 3.0, dn.d, dn.d_error, 2.0).value);
          } else {
            mpfr_ui_pow(power.get(), n, bulk_exponent.get(), MPFR_RNDN);
            local.bulk.add(power);
          }
        }
        return local;
      },
      [&](IndexRange, Local local) {
        total.bulk.add(local.bulk);
        total.spike.add(local.spike);
        total.small.insert(total.small.end(), local.small.begin(), local.small.end());
      });

  const BigFloat factor = pi_squared_over_four(ctx);
  BigFloat bulk = total.bulk.value();
  BigFloat spike = total.spike.value();
  mpfr_mul(bulk.get(), bulk.get(), factor.get(), MPFR_RNDU);
  mpfr_mul(spike.get(), spike.get(), factor.get(), MPFR_RNDU);
  // Round the reported upper bounds outward.
  return SplitReport{alpha, n_max, bulk.to_double(MPFR_RNDU) * kWiden, spike.to_double(MPFR_RNDU) * kWiden,
                     std::move(total.small)};
}

std::vector<RatioPoint> ratio_report(std::uint64_t n_max, const PrecisionContext& ctx, unsigned jobs) {
  SumOptions options;
  options.jobs = jobs;
  const SumLedger ledger = partial_sums(n_max, SeriesParams{}, ctx, n_max, options);
  std::vector<RatioPoint> points;
  for (const LedgerRow& row : ledger.checkpoints) points.push_back(RatioPoint{row.n, row.ratio_SL, row.ratio_SG});
  return points;
}

}  // namespace flinthills
