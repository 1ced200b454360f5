#ifndef FLINTHILLS_DIOPHANTINE_HPP
#define FLINTHILLS_DIOPHANTINE_HPP

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "flinthills/precision.hpp"

namespace flinthills {

/// Certified prefix of the continued fraction of pi.
struct CfExpansion {
  std::vector<mpz_class> quotients;  ///< a_0, a_1, ...
  /// True when fewer than k_max + 1 quotients could be certified.
  bool stopped_early = false;
};

/// Partial quotients a_0..a_K, K <= k_max. A quotient is emitted only when
/// both ends of the interval [pi_value - pi_error, pi_value + pi_error] have
/// the same floor at that depth; the expansion runs on exact rationals.
CfExpansion cf_expand(const PrecisionContext& ctx, std::size_t k_max);

struct Convergent {
  std::size_t k;
  mpz_class a;
  mpz_class p;
  mpz_class q;
  double eps;        ///< |q*pi - p|
  double eps_error;  ///< bound on the evaluation error of eps
};

struct ConvergentList {
  std::vector<Convergent> items;
  bool stopped_early = false;
};

ConvergentList convergents(const PrecisionContext& ctx, std::size_t k_max);

struct GoodApprox {
  std::uint64_t q;
  std::int64_t p;
  double err;  ///< |pi*q - p|
};

/// Denominators q <= n_max with 0 < |pi*q - p| < q^(-nu).
struct GoodApproxSet {
  double nu;
  std::uint64_t n_max;
  std::vector<GoodApprox> members;  ///< sorted by q
};

GoodApproxSet good_denominators(double nu, std::uint64_t n_max, const PrecisionContext& ctx, unsigned jobs = 1);

enum class Verdict { Converges, Diverges, Undecided };

std::string_view to_string(Verdict verdict);

inline constexpr double kMuLowerThreshold = 2.37;
inline constexpr double kMuUpperThreshold = 2.5;

struct CriterionVerdict {
  double mu_input;
  Verdict verdict;
  double lower_threshold = kMuLowerThreshold;
  double upper_threshold = kMuUpperThreshold;
};

/// Converges below 2.37, diverges above 2.5, undecided in between (both
/// endpoints included). Throws std::invalid_argument for mu < 2.
CriterionVerdict classify_mu(double mu);

struct KappaRecord {
  std::uint64_t n;
  double kappa;
};

struct ExponentProbe {
  double kappa_max;
  std::uint64_t argmax_n;
  std::vector<KappaRecord> table;  ///< running record maxima, ascending n
};

/// kappa(n) = ln(1/d(n)) / ln(n), defined for n >= 2.
double kappa(std::uint64_t n, const PrecisionContext& ctx);

ExponentProbe exponent_probe(std::uint64_t n_max, const PrecisionContext& ctx, unsigned jobs = 1);

struct SparsityPoint {
  std::uint64_t n;
  std::uint64_t count;
};

/// 1, 10, 100, ... up to n_max, plus n_max itself.
std::vector<std::uint64_t> decade_checkpoints(std::uint64_t n_max);

/// Running counts of n <= N with d(n) < n^(-nu) at decade checkpoints.
std::vector<SparsityPoint> sparsity_count(double nu, std::uint64_t n_max, const PrecisionContext& ctx,
                                          unsigned jobs = 1);

}  // namespace flinthills

#endif  // FLINTHILLS_DIOPHANTINE_HPP
