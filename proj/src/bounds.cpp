#include "refmargin/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "refmargin/error.hpp"

namespace refmargin {

MarginProfile::MarginProfile(std::vector<double> margins) : sorted_(std::move(margins)) {
  std::sort(sorted_.begin(), sorted_.end());
}

double MarginProfile::mean() const {
  if (sorted_.empty()) throw Error(ErrorCode::EmptyProfile, "empty margin profile");
  return std::accumulate(sorted_.begin(), sorted_.end(), 0.0) / static_cast<double>(sorted_.size());
}

MarginProfile margin_profile(const VotingClassifier& f, const Dataset& data) {
  return MarginProfile(margins(f, data));
}

double margin_loss(const MarginProfile& profile, double theta) {
  if (profile.empty()) throw Error(ErrorCode::EmptyProfile, "empty margin profile");
  const auto& s = profile.sorted_margins();
  const auto below = std::lower_bound(s.begin(), s.end(), theta) - s.begin();
  return static_cast<double>(below) / static_cast<double>(s.size());
}

double theta_at_quantile(const MarginProfile& profile, double p) {
  if (profile.empty()) throw Error(ErrorCode::EmptyProfile, "empty margin profile");
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidQuantile, "quantile must lie in (0,1]");
  const auto m = profile.m();
  auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(m)));
  k = std::clamp<std::size_t>(k, 1, m);
  return profile.sorted_margins()[k - 1];
}

std::vector<double> uniform_grid(std::size_t n) {
  std::vector<double> grid;
  grid.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) grid.push_back(static_cast<double>(i) / static_cast<double>(n));
  return grid;
}

namespace {

void check_grid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] <= 1.0)) throw Error(ErrorCode::InvalidQuantile, "grid values must lie in (0,1]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw Error(ErrorCode::InvalidQuantile, "grid must be strictly increasing");
  }
}

}  // namespace

PenaltyCurve penalty_curve_theta2(const MarginProfile& profile, std::span<const double> grid) {
  check_grid(grid);
  PenaltyCurve curve{PenaltyKind::ThetaSquared, {}};
  curve.points.reserve(grid.size());
  for (double p : grid) {
    const double theta = theta_at_quantile(profile, p);
    PenaltyPoint point{p, theta, std::nullopt};
    if (theta > 0.0) point.penalty = 1.0 / (theta * theta);
    curve.points.push_back(point);
  }
  return curve;
}

PenaltyCurve penalty_curve_capital_n(const MarginProfile& profile, double moment, std::span<const double> grid) {
  check_grid(grid);
  PenaltyCurve curve{PenaltyKind::CapitalN, {}};
  curve.points.reserve(grid.size());
  for (double p : grid) {
    const double theta = theta_at_quantile(profile, p);
    PenaltyPoint point{p, theta, std::nullopt};
    if (theta > 0.0) point.penalty = capital_N(moment, theta);
    curve.points.push_back(point);
  }
  return curve;
}

double moment_statistic(std::span<const double> per_point_sq, double r) {
  if (!(r >= 2.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidExponent, "moment exponent must be >= 2");
  if (per_point_sq.empty()) throw Error(ErrorCode::EmptyInput, "no per-point values");
  double top = 0.0;
  for (double v : per_point_sq) {
    // Tolerate rounding just outside [0,4].
    if (!(v >= -1e-12 && v <= 4.0 + 1e-12)) {
      throw Error(ErrorCode::InvalidParams, "per-point second moments must lie in [0,4]");
    }
    top = std::max(top, v);
  }
  if (top <= 0.0) return 0.0;
  // Power mean of v/top, so a constant sequence maps to exactly 1.
  const double half = r / 2.0;
  double sum = 0.0;
  for (double v : per_point_sq) sum += std::pow(std::max(v, 0.0) / top, half);
  const double mean = sum / static_cast<double>(per_point_sq.size());
  return top * std::pow(mean, 1.0 / half);
}

double capital_N(double moment, double theta) {
  if (!(theta > 0.0)) throw Error(ErrorCode::NonpositiveTheta, "theta must be positive");
  if (!(moment >= 0.0 && moment <= 4.0)) throw Error(ErrorCode::InvalidParams, "moment must lie in [0,4]");
  return std::max(moment / (theta * theta), 1.0 / theta);
}

double bound_exponent(std::size_t m) { return std::log2(16.0 * static_cast<double>(m)); }

MomentReport moment_report(const VotingClassifier& f, const Dataset& data, double theta) {
  MomentReport report;
  report.per_point_sq = per_point_second_moments(f, data);
  report.exponent_r = bound_exponent(data.m());
  report.moment = moment_statistic(report.per_point_sq, report.exponent_r);
  report.theta = theta;
  report.capital_n = capital_N(report.moment, theta);
  return report;
}

CapitalNFull capital_N_full(const VotingClassifier& f, const Dataset& data, double theta) {
  if (!(theta > 0.0)) throw Error(ErrorCode::NonpositiveTheta, "theta must be positive");
  CapitalNFull out;
  out.exponent_r = bound_exponent(data.m());
  const double r = out.exponent_r;

  const auto& w = f.weights();
  std::vector<double> per_point_sq;
  per_point_sq.reserve(data.m());
  double norm_sum = 0.0;
  for (std::size_t i = 0; i < data.m(); ++i) {
    const auto x = data.features(i);
    const double fx = score(f, x);
    const auto outputs = f.hypothesis_outputs(x);
    double sq = 0.0;
    double pw = 0.0;
    for (std::size_t h = 0; h < outputs.size(); ++h) {
      const double d = std::abs(fx - outputs[h]);
      sq += w[h] * d * d;
      pw += w[h] * std::pow(d, r);
    }
    per_point_sq.push_back(sq);
    norm_sum += pw;
  }
  out.delta_norm = std::pow(norm_sum / static_cast<double>(data.m()), 1.0 / r);
  out.moment = moment_statistic(per_point_sq, r);
  out.norm_term = 256.0 * out.delta_norm / theta;
  out.floor_term = 100.0 / theta;
  out.moment_term = 128.0 * std::numbers::e * out.moment / (theta * theta);
  out.value = r * std::max({out.norm_term, out.floor_term, out.moment_term});
  return out;
}

void BoundQuery::validate() const {
  if (m < 1) throw Error(ErrorCode::InvalidParams, "m must be positive");
  if (!(lg_h >= 0.0) || !std::isfinite(lg_h)) throw Error(ErrorCode::InvalidParams, "lg|H| must be nonnegative");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidParams, "delta must lie in (0,1)");
  if (n_net < 1) throw Error(ErrorCode::InvalidParams, "net size must be positive");
  if (!(loss_at_level >= 0.0 && loss_at_level <= 1.0)) {
    throw Error(ErrorCode::InvalidParams, "loss_at_level must lie in [0,1]");
  }
}

NetBound net_bound_explicit(const BoundQuery& q) {
  q.validate();
  const double n = static_cast<double>(q.n_net);
  // ln(N (N+1)^2 |H|^N / delta)
  const double log_core = std::log(n) + 2.0 * std::log1p(n) + n * q.lg_h * std::numbers::ln2 - std::log(q.delta);
  const double m = static_cast<double>(q.m);
  NetBound out;
  out.generalization_term =
      8.0 * (std::numbers::ln2 + log_core) / m + 4.0 * std::sqrt(log_core / m * q.loss_at_level);
  out.approx_term = 8.0 * (2.0 * std::numbers::ln2 + log_core) / m;
  return out;
}

Histogram histogram(std::span<const double> values, std::span<const double> edges) {
  if (edges.size() < 2) throw Error(ErrorCode::BadBins, "need at least two bin edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw Error(ErrorCode::BadBins, "bin edges must be strictly increasing");
  }
  if (!(edges.front() <= -1.0 && edges.back() >= 1.0)) throw Error(ErrorCode::BadBins, "bin edges must cover [-1,1]");

  Histogram h;
  h.edges.assign(edges.begin(), edges.end());
  h.counts.assign(edges.size() - 1, 0);
  std::size_t large = 0;
  for (double v : values) {
    if (!(v >= edges.front() && v <= edges.back())) {
      throw Error(ErrorCode::BadBins, "value " + std::to_string(v) + " outside the bin range");
    }
    auto bin = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
    bin = std::min(bin, edges.size() - 1) - 1;
    ++h.counts[bin];
    if (std::abs(v) >= 0.95) ++large;
  }
  h.total = values.size();
  h.large_fraction = values.empty() ? 0.0 : static_cast<double>(large) / static_cast<double>(values.size());
  return h;
}

Histogram prediction_histogram(const VotingClassifier& f, const Dataset& data, std::span<const double> edges) {
  std::vector<double> values;
  values.reserve(f.size() * data.m());
  for (std::size_t i = 0; i < data.m(); ++i) {
    const auto out = f.hypothesis_outputs(data.features(i));
    values.insert(values.end(), out.begin(), out.end());
  }
  return histogram(values, edges);
}

std::vector<double> uniform_edges(std::size_t bins) {
  if (bins < 1) throw Error(ErrorCode::BadBins, "need at least one bin");
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    edges[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(bins);
  }
  edges.back() = 1.0;
  return edges;
}

double classification_error(const VotingClassifier& f, const Dataset& data) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.m(); ++i) {
    if (static_cast<double>(data.label(i)) * score(f, data.features(i)) <= 0.0) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.m());
}

TableReport table_report(const VotingClassifier& f, const Dataset& train, const Dataset& test) {
  if (train.n_features() != f.n_features() || test.n_features() != f.n_features()) {
    throw Error(ErrorCode::DimensionMismatch, "data and classifier feature counts differ");
  }
  TableReport r;
  r.train_m = train.m();
  r.test_m = test.m();
  r.train_error = classification_error(f, train);
  r.test_error = classification_error(f, test);
  r.mean_margin = margin_profile(f, train).mean();

  double depth_sum = 0.0;
  int depth_max = 0;
  for (const auto& h : f.hypotheses()) {
    const int d = h.tree.depth();
    depth_sum += d;
    depth_max = std::max(depth_max, d);
  }
  r.max_depth = depth_max;
  r.mean_depth = depth_sum / static_cast<double>(f.size());

  const auto sq = per_point_second_moments(f, train);
  r.exponent_lg_m = std::max(2.0, std::log2(static_cast<double>(train.m())));
  r.moment_lg_m = moment_statistic(sq, r.exponent_lg_m);
  r.exponent_lg_16m = bound_exponent(train.m());
  r.moment_lg_16m = moment_statistic(sq, r.exponent_lg_16m);
  return r;
}

}  // namespace refmargin
