#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "refmargin/dataset.hpp"
#include "refmargin/ensemble.hpp"

namespace refmargin {

/// Margins sorted ascending.
class MarginProfile {
 public:
  explicit MarginProfile(std::vector<double> margins);

  [[nodiscard]] std::size_t m() const noexcept { return sorted_.size(); }
  [[nodiscard]] const std::vector<double>& sorted_margins() const noexcept { return sorted_; }
  [[nodiscard]] bool empty() const noexcept { return sorted_.empty(); }
  [[nodiscard]] double mean() const;

 private:
  std::vector<double> sorted_;
};

MarginProfile margin_profile(const VotingClassifier& f, const Dataset& data);

/// Fraction of margins strictly below theta.
double margin_loss(const MarginProfile& profile, double theta);

/// k'th smallest margin with k = max(1, ceil(p*m)), p in (0,1].
double theta_at_quantile(const MarginProfile& profile, double p);

/// `n` evenly spaced quantiles i/n for i = 1..n.
std::vector<double> uniform_grid(std::size_t n);

enum class PenaltyKind { ThetaSquared, CapitalN };

struct PenaltyPoint {
  double p = 0.0;
  double theta = 0.0;
  /// Empty when theta <= 0 (undefined penalty).
  std::optional<double> penalty;
};

struct PenaltyCurve {
  PenaltyKind kind = PenaltyKind::ThetaSquared;
  std::vector<PenaltyPoint> points;
};

/// theta_p^-2 at every grid point. `grid` must be strictly increasing in (0,1].
PenaltyCurve penalty_curve_theta2(const MarginProfile& profile, std::span<const double> grid);

/// capital_N(moment, theta_p) at every grid point.
PenaltyCurve penalty_curve_capital_n(const MarginProfile& profile, double moment, std::span<const double> grid);

/// (mean of v^{r/2})^{2/r}; values in [0,4], r >= 2.
double moment_statistic(std::span<const double> per_point_sq, double r);

/// max(moment / theta^2, 1 / theta).
double capital_N(double moment, double theta);

/// lg(16 m): the moment exponent of the refined bound.
double bound_exponent(std::size_t m);

struct MomentReport {
  std::vector<double> per_point_sq;
  double exponent_r = 0.0;
  double moment = 0.0;
  double theta = 0.0;
  double capital_n = 0.0;
};

/// Moment with r = lg(16m) and the resulting N at theta.
MomentReport moment_report(const VotingClassifier& f, const Dataset& data, double theta);

struct CapitalNFull {
  double exponent_r = 0.0;   ///< lg(16m)
  double delta_norm = 0.0;   ///< ||Delta(x,h)||_r over (x,y)~S, h~Q
  double moment = 0.0;       ///< moment statistic at r
  double norm_term = 0.0;    ///< 256 ||Delta||_r / theta
  double floor_term = 0.0;   ///< 100 / theta
  double moment_term = 0.0;  ///< 128 e moment / theta^2
  double value = 0.0;        ///< lg(16m) * max of the three terms
};

/// Penalty with explicit constants:
/// lg(16m) * max{256 ||Delta||_{lg 16m} / theta, 100/theta, 128 e moment / theta^2}.
CapitalNFull capital_N_full(const VotingClassifier& f, const Dataset& data, double theta);

struct BoundQuery {
  std::size_t m = 0;
  double lg_h = 0.0;   ///< lg |H|
  double delta = 0.05;
  std::size_t n_net = 1;
  double loss_at_level = 0.0;

  void validate() const;
};

struct NetBound {
  double generalization_term = 0.0;
  double approx_term = 0.0;
};

/// Additive penalties of the net event E_N, with |H|^N handled in log space:
///   generalization = 8 ln(2 N(N+1)^2 |H|^N / delta) / m
///                    + 4 sqrt(ln(N(N+1)^2 |H|^N / delta) / m * loss)
///   approx         = 8 ln(4 N(N+1)^2 |H|^N / delta) / m
NetBound net_bound_explicit(const BoundQuery& q);

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  /// Fraction of predictions with |value| >= 0.95.
  double large_fraction = 0.0;
};

/// Bins are [e_i, e_{i+1}) except the last, which is closed. Edges must be
/// strictly increasing and cover [-1, 1].
Histogram histogram(std::span<const double> values, std::span<const double> edges);

/// Histogram of every normalized hypothesis output on every sample.
Histogram prediction_histogram(const VotingClassifier& f, const Dataset& data, std::span<const double> edges);

/// `bins` equal-width edges over [-1,1].
std::vector<double> uniform_edges(std::size_t bins);

struct TableReport {
  std::size_t train_m = 0;
  std::size_t test_m = 0;
  double train_error = 0.0;
  double test_error = 0.0;
  double mean_margin = 0.0;
  double max_depth = 0.0;
  double mean_depth = 0.0;
  double exponent_lg_m = 0.0;
  double moment_lg_m = 0.0;
  double exponent_lg_16m = 0.0;
  double moment_lg_16m = 0.0;
};

/// 0-1 error counts a point as wrong when y f(x) <= 0.
double classification_error(const VotingClassifier& f, const Dataset& data);

TableReport table_report(const VotingClassifier& f, const Dataset& train, const Dataset& test);

}  // namespace refmargin
