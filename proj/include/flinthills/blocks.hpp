#ifndef FLINTHILLS_BLOCKS_HPP
#define FLINTHILLS_BLOCKS_HPP

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "flinthills/diophantine.hpp"
#include "flinthills/precision.hpp"

namespace flinthills {

inline constexpr double kDefaultTau = 0.1;
inline constexpr double kDefaultSpikeThreshold = 1.0;

/// Integers n with |n - q_k pi| < tau q_k.
struct BlockWindow {
  std::uint64_t n_lo;
  std::uint64_t n_hi;
};

/// Throws EmptyWindowError when no integer lies in the window and
/// PrecisionError when a bound sits too close to an integer to certify.
BlockWindow block_window(const Convergent& convergent, double tau, const PrecisionContext& ctx);
BlockWindow block_window(std::size_t k, double tau, const PrecisionContext& ctx);

struct BlockReport {
  std::size_t k;
  mpz_class q_k;
  mpz_class q_k1;
  double tau;
  std::uint64_t n_lo;
  std::uint64_t n_hi;
  std::uint64_t central_n;  ///< integer nearest q_k pi
  double measured_sum;
  double central_term;
  double heuristic;  ///< constant / (q_k^2 q_{k+1})
  double ratio;      ///< measured_sum / heuristic
};

BlockReport block_sum(std::size_t k, double tau, const PrecisionContext& ctx, double constant = 1.0);

/// Log-space least-squares constant C for C / (q_k^2 q_{k+1}):
/// ln C = mean of ln(measured_k q_k^2 q_{k+1}). Needs at least two blocks.
double fit_constant(std::span<const BlockReport> blocks);
double fit_constant(std::span<const std::size_t> k_list, double tau, const PrecisionContext& ctx);

struct SpikeEvent {
  std::uint64_t n;
  double term;
  std::optional<std::size_t> matched_k;              ///< n == p_k
  std::optional<std::size_t> matched_denominator_k;  ///< n == q_k
};

/// Every n <= n_max with 1/(n^3 sin^2 n) > threshold, ascending.
std::vector<SpikeEvent> spike_scan(std::uint64_t n_max, double threshold, const PrecisionContext& ctx,
                                   unsigned jobs = 1);

}  // namespace flinthills

#endif  // FLINTHILLS_BLOCKS_HPP
