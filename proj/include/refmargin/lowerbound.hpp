#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace refmargin {

/// Occupancy experiment: m uniform draws over u bins, repeated `trials` times.
struct LBParams {
  std::size_t u = 100;
  std::size_t d = 5;
  std::size_t m = 1000;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  /// Worker threads for trial simulation; 0 means hardware concurrency.
  /// Results do not depend on this value.
  unsigned threads = 1;

  void validate() const;
};

struct LBTrial {
  std::vector<std::uint32_t> counts;  ///< b_1..b_u
  std::uint64_t smallest_d_sum = 0;   ///< sum of the d smallest counts
  /// smallest_d_sum <= (d m / u)(1 - delta)
  bool event_orderstat = false;
  /// Bins with b_i <= (1 - delta) m / u (lower-tail direction).
  std::size_t low_bins = 0;
};

/// delta = sqrt(ln(u / 2d) / (9 m / u)). Throws ParamsOutOfRegime when
/// u <= 2d or delta > 1/2.
double regime_delta(const LBParams& params);

/// One experiment per trial, using a per-trial stream derived from
/// (seed, trial index). Events are evaluated at `delta`.
std::vector<LBTrial> simulate_occupancy(const LBParams& params, double delta);

/// As above at regime_delta(params) when the parameters are in regime,
/// otherwise at delta = 0.
std::vector<LBTrial> simulate_occupancy(const LBParams& params);

/// Sum of the `d` smallest counts.
std::uint64_t smallest_sum(std::span<const std::uint32_t> counts, std::size_t d);

struct LBReport {
  double delta = 0.0;
  double threshold = 0.0;  ///< (d m / u)(1 - delta)
  double empirical_frequency = 0.0;
  double required_frequency = 1.0 / 50.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
  bool pass = false;
};

/// Frequency of smallest_d_sum <= (d m / u)(1 - delta) at the regime delta.
LBReport verify_order_stat_bound(const LBParams& params);

struct ChernoffCheck {
  std::size_t k = 0;      ///< floor((1 - delta) m / u)
  double lhs = 0.0;       ///< Pr[Bin(m, 1/u) <= k]
  double log_lhs = 0.0;
  double rhs = 0.0;       ///< exp(-9 m delta^2 / u)
  double log_rhs = 0.0;
  bool pass = false;
};

/// Exact lower tail of Bin(m, 1/u) against exp(-9 m delta^2 / u).
/// Requires sqrt(3u/m) <= delta <= 1/2 (DeltaOutOfRange otherwise).
ChernoffCheck reverse_chernoff_check(std::size_t m, std::size_t u, double delta);

/// ln Pr[Bin(n, p) <= k], summed smallest term first in log space.
double log_binomial_cdf(std::size_t n, double p, std::size_t k);

struct PaleyZygmundCheck {
  double delta = 0.0;
  double mean_b = 0.0;         ///< estimate of E[B]
  double mean_b2 = 0.0;        ///< estimate of E[B^2]
  double lhs = 0.0;            ///< empirical Pr[B >= E[B]/2]
  double rhs_bound = 0.0;      ///< E[B]^2 / (4 E[B^2])
  double standard_error = 0.0; ///< binomial standard error of lhs
  double prob_b_at_least_d = 0.0;
  bool second_moment_ok = true;  ///< E[B^2] <= 2 E[B]^2 when E[B] >= 1
  bool one_eighth_checked = false;
  bool pass = false;
};

/// B counts the bins with b_i <= (1 - delta) m / u.
PaleyZygmundCheck paley_zygmund_check(const LBParams& params, double delta);

/// Fraction of strictly negative entries.
double uniform_loss_identity(std::span<const double> values);

}  // namespace refmargin
