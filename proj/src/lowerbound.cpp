#include "refmargin/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "refmargin/error.hpp"
#include "refmargin/rng.hpp"

namespace refmargin {

void LBParams::validate() const {
  if (u < 1) throw Error(ErrorCode::InvalidParams, "u must be at least 1");
  if (d < 1 || d > u) throw Error(ErrorCode::InvalidParams, "d must lie in [1, u]");
  if (m < 1) throw Error(ErrorCode::InvalidParams, "m must be at least 1");
  if (trials < 1) throw Error(ErrorCode::InvalidParams, "trials must be at least 1");
  if (m > std::numeric_limits<std::uint32_t>::max()) throw Error(ErrorCode::InvalidParams, "m too large");
}

double regime_delta(const LBParams& params) {
  params.validate();
  if (params.u <= 2 * params.d) {
    throw Error(ErrorCode::ParamsOutOfRegime,
                "u = " + std::to_string(params.u) + " <= 2d = " + std::to_string(2 * params.d) +
                    ": ln(u/2d) is not positive, so the order-statistic bound is vacuous");
  }
  const double u = static_cast<double>(params.u);
  const double delta = std::sqrt(std::log(u / (2.0 * static_cast<double>(params.d))) /
                                 (9.0 * static_cast<double>(params.m) / u));
  if (delta > 0.5) {
    throw Error(ErrorCode::ParamsOutOfRegime,
                "delta = " + std::to_string(delta) + " exceeds 1/2; increase m relative to u");
  }
  return delta;
}

std::uint64_t smallest_sum(std::span<const std::uint32_t> counts, std::size_t d) {
  d = std::min(d, counts.size());
  std::vector<std::uint32_t> sorted(counts.begin(), counts.end());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(d), sorted.end());
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < d; ++i) sum += sorted[i];
  return sum;
}

namespace {

LBTrial run_trial(const LBParams& params, std::size_t index, double threshold, double level) {
  Rng rng = Rng::for_stream(params.seed, index);
  LBTrial trial;
  trial.counts.assign(params.u, 0);
  for (std::size_t j = 0; j < params.m; ++j) ++trial.counts[rng.uniform_index(params.u)];
  trial.smallest_d_sum = smallest_sum(trial.counts, params.d);
  trial.event_orderstat = static_cast<double>(trial.smallest_d_sum) <= threshold;
  trial.low_bins = static_cast<std::size_t>(
      std::count_if(trial.counts.begin(), trial.counts.end(), [level](auto b) { return static_cast<double>(b) <= level; }));
  return trial;
}

}  // namespace

std::vector<LBTrial> simulate_occupancy(const LBParams& params, double delta) {
  params.validate();
  if (!(delta >= 0.0 && delta <= 1.0)) throw Error(ErrorCode::InvalidParams, "delta must lie in [0,1]");
  const double per_bin = static_cast<double>(params.m) / static_cast<double>(params.u);
  const double level = (1.0 - delta) * per_bin;
  const double threshold = static_cast<double>(params.d) * level;

  std::vector<LBTrial> trials(params.trials);
  unsigned workers = params.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : params.threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, params.trials));
  if (workers <= 1) {
    for (std::size_t i = 0; i < params.trials; ++i) trials[i] = run_trial(params, i, threshold, level);
    return trials;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < params.trials; i += workers) trials[i] = run_trial(params, i, threshold, level);
    });
  }
  pool.clear();
  return trials;
}

std::vector<LBTrial> simulate_occupancy(const LBParams& params) {
  params.validate();
  double delta = 0.0;
  if (params.u > 2 * params.d) {
    const double u = static_cast<double>(params.u);
    const double candidate = std::sqrt(std::log(u / (2.0 * static_cast<double>(params.d))) /
                                       (9.0 * static_cast<double>(params.m) / u));
    if (candidate <= 0.5) delta = candidate;
  }
  return simulate_occupancy(params, delta);
}

LBReport verify_order_stat_bound(const LBParams& params) {
  LBReport report;
  report.delta = regime_delta(params);
  report.threshold = static_cast<double>(params.d) * static_cast<double>(params.m) /
                     static_cast<double>(params.u) * (1.0 - report.delta);
  const auto trials = simulate_occupancy(params, report.delta);
  const auto hits = std::count_if(trials.begin(), trials.end(), [](const LBTrial& t) { return t.event_orderstat; });
  report.trials = trials.size();
  const double n = static_cast<double>(trials.size());
  report.empirical_frequency = static_cast<double>(hits) / n;
  report.standard_error = std::sqrt(report.empirical_frequency * (1.0 - report.empirical_frequency) / n);
  report.pass = report.empirical_frequency >= report.required_frequency;
  return report;
}

double log_binomial_cdf(std::size_t n, double p, std::size_t k) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidParams, "p must lie in (0,1)");
  k = std::min(k, n);
  std::vector<double> terms;
  terms.reserve(k + 1);
  const double log_odds = std::log(p) - std::log1p(-p);
  double t = static_cast<double>(n) * std::log1p(-p);
  terms.push_back(t);
  for (std::size_t i = 0; i < k; ++i) {
    t += std::log(static_cast<double>(n - i) / static_cast<double>(i + 1)) + log_odds;
    terms.push_back(t);
  }
  std::sort(terms.begin(), terms.end());
  double acc = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) {
    const double hi = std::max(acc, terms[i]);
    const double lo = std::min(acc, terms[i]);
    acc = hi + std::log1p(std::exp(lo - hi));
  }
  return std::min(acc, 0.0);
}

ChernoffCheck reverse_chernoff_check(std::size_t m, std::size_t u, double delta) {
  if (m < 1 || u < 2) throw Error(ErrorCode::InvalidParams, "need m >= 1 and u >= 2");
  const double ratio = static_cast<double>(m) / static_cast<double>(u);
  const double lower = std::sqrt(3.0 / ratio);
  constexpr double slack = 1e-12;
  if (!(delta >= lower - slack && delta <= 0.5 + slack)) {
    throw Error(ErrorCode::DeltaOutOfRange, "delta = " + std::to_string(delta) + " outside [sqrt(3u/m), 1/2] = [" +
                                                std::to_string(lower) + ", 0.5]");
  }
  ChernoffCheck c;
  c.k = static_cast<std::size_t>(std::floor((1.0 - delta) * ratio + 1e-9));
  c.log_lhs = log_binomial_cdf(m, 1.0 / static_cast<double>(u), c.k);
  c.lhs = std::exp(c.log_lhs);
  c.log_rhs = -9.0 * static_cast<double>(m) * delta * delta / static_cast<double>(u);
  c.rhs = std::exp(c.log_rhs);
  c.pass = c.log_lhs >= c.log_rhs;
  return c;
}

PaleyZygmundCheck paley_zygmund_check(const LBParams& params, double delta) {
  const auto trials = simulate_occupancy(params, delta);
  PaleyZygmundCheck c;
  c.delta = delta;
  const double n = static_cast<double>(trials.size());
  for (const auto& t : trials) {
    const double b = static_cast<double>(t.low_bins);
    c.mean_b += b;
    c.mean_b2 += b * b;
  }
  c.mean_b /= n;
  c.mean_b2 /= n;
  std::size_t above_half = 0;
  std::size_t at_least_d = 0;
  for (const auto& t : trials) {
    const double b = static_cast<double>(t.low_bins);
    if (b >= c.mean_b / 2.0) ++above_half;
    if (t.low_bins >= params.d) ++at_least_d;
  }
  c.lhs = static_cast<double>(above_half) / n;
  c.prob_b_at_least_d = static_cast<double>(at_least_d) / n;
  // A constant B (including B = 0) has ratio exactly 1/4.
  c.rhs_bound = c.mean_b2 > 0.0 ? c.mean_b * c.mean_b / (4.0 * c.mean_b2) : 0.25;
  c.standard_error = std::sqrt(c.lhs * (1.0 - c.lhs) / n);
  if (c.mean_b >= 1.0) c.second_moment_ok = c.mean_b2 <= 2.0 * c.mean_b * c.mean_b;
  c.pass = c.lhs >= c.rhs_bound - 3.0 * c.standard_error;
  if (c.mean_b >= 2.0 * static_cast<double>(params.d)) {
    c.one_eighth_checked = true;
    c.pass = c.pass && c.lhs >= 1.0 / 8.0 - 3.0 * c.standard_error;
  }
  return c;
}

double uniform_loss_identity(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "no values");
  const auto negative = std::count_if(values.begin(), values.end(), [](double v) { return v < 0.0; });
  return static_cast<double>(negative) / static_cast<double>(values.size());
}

}  // namespace refmargin
