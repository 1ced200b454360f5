#include "flinthills/blocks.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "flinthills/parallel.hpp"
#include "flinthills/series.hpp"

namespace flinthills {
namespace {

constexpr std::size_t kConvergentSearchDepth = 4096;

// Rounds `x` with the given mode and checks that the distance from x to the
// nearest integer exceeds `uncertainty`.
std::uint64_t certified_integer_bound(const BigFloat& x, mpfr_rnd_t mode, double uncertainty) {
  BigFloat nearest(x.precision());
  mpfr_rint(nearest.get(), x.get(), MPFR_RNDN);
  BigFloat gap(x.precision());
  mpfr_sub(gap.get(), x.get(), nearest.get(), MPFR_RNDN);
  if (!(std::fabs(gap.to_double()) > uncertainty)) {
    throw PrecisionError("block window bound too close to an integer to certify");
  }
  if (mpfr_sgn(x.get()) < 0) return 0;
  if (mpfr_cmp_ui(x.get(), std::uint64_t{1} << 62) > 0) throw std::out_of_range("block window beyond 2^62");
  return mpfr_get_ui(x.get(), mode);
}

const Convergent& certified_convergent(const ConvergentList& list, std::size_t k) {
  if (k >= list.items.size()) {
    throw PrecisionError("convergent k=" + std::to_string(k) + " not certified at this precision");
  }
  return list.items[k];
}

}  // namespace

BlockWindow block_window(const Convergent& convergent, double tau, const PrecisionContext& ctx) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be > 0");
  const mpz_class& q = convergent.q;
  const mpfr_prec_t prec = ctx.bits() + static_cast<mpfr_prec_t>(mpz_sizeinbase(q.get_mpz_t(), 2)) + 128;

  BigFloat centre(prec);
  mpfr_mul_z(centre.get(), ctx.pi_value().get(), q.get_mpz_t(), MPFR_RNDN);
  BigFloat half_width(prec, tau);
  mpfr_mul_z(half_width.get(), half_width.get(), q.get_mpz_t(), MPFR_RNDN);

  BigFloat lo(prec), hi(prec);
  mpfr_sub(lo.get(), centre.get(), half_width.get(), MPFR_RNDN);
  mpfr_add(hi.get(), centre.get(), half_width.get(), MPFR_RNDN);

  const double uncertainty = q.get_d() * ctx.pi_error() * (1.0 + 0x1p-40);
  const std::uint64_t n_lo = std::max<std::uint64_t>(1, certified_integer_bound(lo, MPFR_RNDU, uncertainty));
  const std::uint64_t n_hi = certified_integer_bound(hi, MPFR_RNDD, uncertainty);
  if (n_lo > n_hi) {
    throw EmptyWindowError("block window for q=" + q.get_str() + " with tau=" + std::to_string(tau) +
                           " contains no integer");
  }
  return BlockWindow{n_lo, n_hi};
}

BlockWindow block_window(std::size_t k, double tau, const PrecisionContext& ctx) {
  const ConvergentList list = convergents(ctx, k);
  return block_window(certified_convergent(list, k), tau, ctx);
}

BlockReport block_sum(std::size_t k, double tau, const PrecisionContext& ctx, double constant) {
  if (!(constant > 0.0) || !std::isfinite(constant)) throw std::invalid_argument("constant must be > 0");
  const ConvergentList list = convergents(ctx, k + 1);
  const Convergent& current = certified_convergent(list, k);
  const Convergent& next = certified_convergent(list, k + 1);
  const BlockWindow window = block_window(current, tau, ctx);

  // The integer nearest q_k pi is the convergent numerator for k >= 1 and
  // 3 = p_0 for k = 0.
  const std::uint64_t central_n = current.p.get_ui();

  CompensatedSum measured;
  BigFloat central(kTermBits);
  for (std::uint64_t n = window.n_lo; n <= window.n_hi; ++n) {
    Term t = term_S(n, ctx);
    if (n == central_n) central = t.value;
    measured.add(t.value);
  }
  if (central.is_zero()) {
    central = term_S(central_n, ctx).value;
  }

  BigFloat heuristic(kTermBits);
  mpfr_set_z(heuristic.get(), current.q.get_mpz_t(), MPFR_RNDN);
  mpfr_sqr(heuristic.get(), heuristic.get(), MPFR_RNDN);
  mpfr_mul_z(heuristic.get(), heuristic.get(), next.q.get_mpz_t(), MPFR_RNDN);
  BigFloat numerator(kTermBits, constant);
  mpfr_div(heuristic.get(), numerator.get(), heuristic.get(), MPFR_RNDN);

  const double measured_sum = measured.value().to_double();
  const double heuristic_value = heuristic.to_double();
  return BlockReport{k,
                     current.q,
                     next.q,
                     tau,
                     window.n_lo,
                     window.n_hi,
                     central_n,
                     measured_sum,
                     central.to_double(),
                     heuristic_value,
                     measured_sum / heuristic_value};
}

double fit_constant(std::span<const BlockReport> blocks) {
  if (blocks.size() < 2) throw std::invalid_argument("fit_constant needs at least two blocks");
  double total = 0.0;
  for (const BlockReport& block : blocks) {
    total += std::log(block.measured_sum) + 2.0 * std::log(block.q_k.get_d()) + std::log(block.q_k1.get_d());
  }
  return std::exp(total / static_cast<double>(blocks.size()));
}

double fit_constant(std::span<const std::size_t> k_list, double tau, const PrecisionContext& ctx) {
  std::vector<BlockReport> blocks;
  blocks.reserve(k_list.size());
  for (const std::size_t k : k_list) blocks.push_back(block_sum(k, tau, ctx));
  return fit_constant(blocks);
}

std::vector<SpikeEvent> spike_scan(std::uint64_t n_max, double threshold, const PrecisionContext& ctx,
                                   unsigned jobs) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (!(threshold > 0.0) || !std::isfinite(threshold)) throw std::invalid_argument("threshold must be > 0");

  const ConvergentList list = convergents(ctx, kConvergentSearchDepth);
  if (list.items.empty() || cmp(list.items.back().p, n_max) <= 0) {
    throw PrecisionError("convergent numerators not certified up to n_max");
  }

  std::vector<SpikeEvent> events;
  for_each_chunk(
      1, n_max, jobs,
      [&](IndexRange range) {
        std::vector<SpikeEvent> local;
        for (std::uint64_t n = range.first; n <= range.last; ++n) {
          const Term t = term_S(n, ctx);
          if (!certified_at_least(t.value, t.error, threshold, n)) continue;
          local.push_back(SpikeEvent{n, t.value.to_double(), std::nullopt, std::nullopt});
        }
        return local;
      },
      [&](IndexRange, std::vector<SpikeEvent> local) { events.insert(events.end(), local.begin(), local.end()); });

  for (SpikeEvent& event : events) {
    for (const Convergent& c : list.items) {
      if (cmp(c.p, event.n) == 0) event.matched_k = c.k;
      if (cmp(c.q, event.n) == 0) event.matched_denominator_k = c.k;
    }
  }
  return events;
}

}  // namespace flinthills
