#ifndef FLINTHILLS_SERIES_HPP
#define FLINTHILLS_SERIES_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "flinthills/big_float.hpp"
#include "flinthills/diophantine.hpp"
#include "flinthills/precision.hpp"

namespace flinthills {

/// Working precision of individual terms and of the accumulators.
inline constexpr mpfr_prec_t kTermBits = 128;
inline constexpr std::uint64_t kDefaultStride = 1000;
inline constexpr double kHalfPi = 1.5707963267948966;  // largest double <= pi/2

/// A series term with a certified absolute error bound.
struct Term {
  BigFloat value;
  double error;
};

/// 1 / (n^a * |sin n|^b) style term from a base value known to within
/// `base_error`. Shared by every series in this module.
Term inverse_power_term(std::uint64_t n, double a, const BigFloat& base, double base_error, double b);

/// 1/(n^3 sin^2 n)
Term term_S(std::uint64_t n, const PrecisionContext& ctx);
/// 1/(n^3 d(n)^2)
Term term_L(std::uint64_t n, const PrecisionContext& ctx);

/// Piecewise lower bound for sin on [0, pi/2]: x - x^3/6 up to and including
/// 1, (2/pi) x beyond. Throws std::invalid_argument outside [0, pi/2].
double B_bound(double x);

/// Same bound at arbitrary precision; accepts any x >= 0.
BigFloat B_bound(const BigFloat& x, const BigFloat& pi);

/// Neumaier-compensated accumulator at kTermBits.
class CompensatedSum {
 public:
  CompensatedSum();
  CompensatedSum(BigFloat sum, BigFloat compensation);

  void add(const BigFloat& x);
  /// Folds in another accumulator (its sum, then its compensation).
  void add(const CompensatedSum& other);

  BigFloat value() const;
  const BigFloat& sum() const noexcept { return sum_; }
  const BigFloat& compensation() const noexcept { return compensation_; }

 private:
  BigFloat sum_;
  BigFloat compensation_;
};

struct SeriesParams {
  double a = 3.0;      ///< power of n
  double b = 2.0;      ///< power of |sin n|
  double eta = 0.0;    ///< extra weight n^eta
  double delta = 1.0;  ///< safe-region threshold
  double alpha = 0.5;  ///< adaptive threshold exponent

  /// Throws std::invalid_argument on a violated range.
  void validate() const;
};

struct LedgerRow {
  std::uint64_t n;
  BigFloat S, L, G, G_sharp, ratio_SL, ratio_SG;
  double S_error, L_error, G_sharp_error;
};

struct MaxTerm {
  std::uint64_t n = 0;
  BigFloat value{kTermBits};
};

/// Prefix sums S, L and G# over n = 1..n_done. G is derived as (pi/2)^b * L.
struct SumLedger {
  std::uint64_t n_done = 0;
  SeriesParams params;
  BigFloat g_factor{kTermBits};
  CompensatedSum S_sum, L_sum, G_sharp_sum;
  /// Sums of per-term error bounds.
  double S_term_error = 0.0, L_term_error = 0.0, G_sharp_term_error = 0.0;
  MaxTerm max_term;
  std::vector<LedgerRow> checkpoints;

  BigFloat S() const { return S_sum.value(); }
  BigFloat L() const { return L_sum.value(); }
  BigFloat G_sharp() const { return G_sharp_sum.value(); }
  BigFloat G() const;

  /// Per-term errors plus the accumulation bound.
  double S_error() const;
  double L_error() const;
  double G_sharp_error() const;
};

/// True for rows the ledger always records: multiples of the stride and
/// powers of ten.
bool is_regular_checkpoint(std::uint64_t n, std::uint64_t stride);

struct SumOptions {
  unsigned jobs = 1;
  /// Continue from this ledger; its n_done must be a chunk boundary.
  const SumLedger* resume = nullptr;
  std::function<void(const LedgerRow&)> on_row;
  /// Called after every completed chunk whose end is a multiple of
  /// kChunkLength.
  std::function<void(const SumLedger&)> on_chunk_boundary;
  bool keep_rows = true;
};

/// S, L and G# (with exponents a + eta and b) over 1..n_max. Rows at every
/// regular checkpoint plus n_max. Output does not depend on options.jobs.
SumLedger partial_sums(std::uint64_t n_max, const SeriesParams& params, const PrecisionContext& ctx,
                       std::uint64_t stride = kDefaultStride, const SumOptions& options = {});

struct Zeta3 {
  BigFloat value;
  double error;
};

/// zeta(3) from the alternating central-binomial series, to context precision.
Zeta3 zeta3(const PrecisionContext& ctx);

struct SafeRegionReport {
  double delta;
  std::uint64_t n_max;
  double sum_over_A_delta;
  double sum_error;
  double bound;  ///< pi^2 / (4 delta^2) * zeta(3)
  std::uint64_t member_count;
};

/// Sum of 1/(n^3 sin^2 n) over n <= n_max with d(n) >= delta.
SafeRegionReport safe_region_sum(double delta, std::uint64_t n_max, const PrecisionContext& ctx, unsigned jobs = 1);

struct WeightedPoint {
  std::uint64_t n;
  BigFloat value;
  std::uint64_t small_count;  ///< n' <= n with d(n') < n'^(-1-eta/4)
};

struct WeightedReport {
  double eta;
  BigFloat value;
  double error;
  std::vector<WeightedPoint> checkpoints;  ///< decade checkpoints
};

/// Sum of 1/(n^(3+eta) sin^2 n) with the small-distance counts.
WeightedReport weighted_sum(double eta, std::uint64_t n_max, const PrecisionContext& ctx, unsigned jobs = 1);

/// Sum of 1/(n^a |sin n|^b).
Term generalized_sum(double a, double b, std::uint64_t n_max, const PrecisionContext& ctx, unsigned jobs = 1);

struct SplitReport {
  double alpha;
  std::uint64_t n_max;
  double bulk_bound;  ///< sum over d(n) >= n^-alpha of (pi^2/4) / (n^3 n^-2alpha)
  double spike_part;  ///< sum over d(n) < n^-alpha of (pi^2/4) / (n^3 d(n)^2)
  std::vector<std::uint64_t> small_set;
};

SplitReport adaptive_split(double alpha, std::uint64_t n_max, const PrecisionContext& ctx, unsigned jobs = 1);

struct RatioPoint {
  std::uint64_t n;
  BigFloat ratio_SL;
  BigFloat ratio_SG;
};

/// S/L and S/G at decade checkpoints from a single pass.
std::vector<RatioPoint> ratio_report(std::uint64_t n_max, const PrecisionContext& ctx, unsigned jobs = 1);

}  // namespace flinthills

#endif  // FLINTHILLS_SERIES_HPP
