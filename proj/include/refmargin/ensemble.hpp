#pragma once

#include <span>
#include <vector>

#include "refmargin/boosting.hpp"
#include "refmargin/dataset.hpp"
#include "refmargin/tree.hpp"

namespace refmargin {

/// A tree together with the divisor that maps its outputs into [-1,1].
struct BaseHypothesis {
  Tree tree;
  double scale = 1.0;

  [[nodiscard]] double predict(std::span<const double> x) const { return tree.predict(x) / scale; }
};

/// Convex combination of base hypotheses with outputs in [-1,1].
///
/// `weights` is the distribution Q(f) over hypotheses. `scale_total` is the
/// factor Z with f(x) = F_raw(x) / Z for the raw ensemble this came from
/// (1 for classifiers built directly).
class VotingClassifier {
 public:
  /// Throws SchemaError unless sizes agree, weights are nonnegative and sum
  /// to 1 within 1e-12, scales are positive, and all trees share a feature
  /// count.
  VotingClassifier(std::vector<BaseHypothesis> hypotheses, std::vector<double> weights, double scale_total = 1.0);

  [[nodiscard]] std::size_t size() const noexcept { return hypotheses_.size(); }
  [[nodiscard]] std::size_t n_features() const noexcept { return n_features_; }
  [[nodiscard]] const std::vector<BaseHypothesis>& hypotheses() const noexcept { return hypotheses_; }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
  [[nodiscard]] double scale_total() const noexcept { return scale_total_; }

  /// Normalized output of every hypothesis at x.
  [[nodiscard]] std::vector<double> hypothesis_outputs(std::span<const double> x) const;

 private:
  std::vector<BaseHypothesis> hypotheses_;
  std::vector<double> weights_;
  double scale_total_ = 1.0;
  std::size_t n_features_ = 0;
};

/// Rescales every tree by Delta_h = max(|min leaf|, |max leaf|) (1 for an
/// all-zero tree), multiplies its coefficient by Delta_h and renormalizes
/// the coefficients to sum to one.
VotingClassifier normalize(const RawEnsemble& raw);

/// sum_h w_h h(x), clamped into [-1,1] against rounding.
double score(const VotingClassifier& f, std::span<const double> x);

/// y_i * score(f, x_i) for every sample, in data order.
std::vector<double> margins(const VotingClassifier& f, const Dataset& data);

/// E_{h~Q}[(f(x) - h(x))^2].
double delta_second_moment(const VotingClassifier& f, std::span<const double> x);

/// delta_second_moment at every sample, in data order.
std::vector<double> per_point_second_moments(const VotingClassifier& f, const Dataset& data);

}  // namespace refmargin
