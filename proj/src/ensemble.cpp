#include "refmargin/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "refmargin/error.hpp"

namespace refmargin {

namespace {

void check_dimension(const VotingClassifier& f, std::span<const double> x) {
  if (x.size() != f.n_features()) {
    throw Error(ErrorCode::DimensionMismatch, "input has " + std::to_string(x.size()) +
                                                  " features, classifier expects " + std::to_string(f.n_features()));
  }
}

}  // namespace

VotingClassifier::VotingClassifier(std::vector<BaseHypothesis> hypotheses, std::vector<double> weights,
                                   double scale_total)
    : hypotheses_(std::move(hypotheses)), weights_(std::move(weights)), scale_total_(scale_total) {
  if (hypotheses_.empty()) throw Error(ErrorCode::EmptyEnsemble, "voting classifier has no hypotheses");
  if (hypotheses_.size() != weights_.size()) {
    throw Error(ErrorCode::SchemaError, "hypothesis and weight counts differ");
  }
  if (!(scale_total_ > 0.0) || !std::isfinite(scale_total_)) {
    throw Error(ErrorCode::SchemaError, "scale_total must be positive");
  }
  n_features_ = hypotheses_.front().tree.n_features();
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      throw Error(ErrorCode::SchemaError, "weights must be finite and nonnegative");
    }
    if (!(hypotheses_[i].scale > 0.0) || !std::isfinite(hypotheses_[i].scale)) {
      throw Error(ErrorCode::SchemaError, "hypothesis scales must be positive");
    }
    if (hypotheses_[i].tree.n_features() != n_features_) {
      throw Error(ErrorCode::FeatureMismatch, "hypotheses disagree on feature count");
    }
    sum += weights_[i];
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error(ErrorCode::SchemaError, "weights sum to " + std::to_string(sum) + ", expected 1");
  }
}

std::vector<double> VotingClassifier::hypothesis_outputs(std::span<const double> x) const {
  check_dimension(*this, x);
  std::vector<double> out;
  out.reserve(hypotheses_.size());
  for (const auto& h : hypotheses_) out.push_back(h.predict(x));
  return out;
}

VotingClassifier normalize(const RawEnsemble& raw) {
  if (raw.trees.empty()) throw Error(ErrorCode::EmptyEnsemble, "cannot normalize an empty ensemble");
  if (raw.trees.size() != raw.coefficients.size()) {
    throw Error(ErrorCode::SchemaError, "tree and coefficient counts differ");
  }
  std::vector<BaseHypothesis> hyps;
  std::vector<double> weights;
  hyps.reserve(raw.trees.size());
  weights.reserve(raw.trees.size());
  double total = 0.0;
  for (std::size_t t = 0; t < raw.trees.size(); ++t) {
    if (!(raw.coefficients[t] > 0.0)) {
      throw Error(ErrorCode::SchemaError, "coefficient " + std::to_string(t) + " is not positive");
    }
    const auto [lo, hi] = raw.trees[t].output_range();
    double scale = std::max(std::abs(lo), std::abs(hi));
    if (scale == 0.0) scale = 1.0;
    hyps.push_back({raw.trees[t], scale});
    weights.push_back(raw.coefficients[t] * scale);
    total += weights.back();
  }
  for (auto& w : weights) w /= total;
  return VotingClassifier(std::move(hyps), std::move(weights), total);
}

double score(const VotingClassifier& f, std::span<const double> x) {
  check_dimension(f, x);
  double sum = 0.0;
  const auto& hyps = f.hypotheses();
  const auto& w = f.weights();
  for (std::size_t i = 0; i < hyps.size(); ++i) sum += w[i] * hyps[i].predict(x);
  return std::clamp(sum, -1.0, 1.0);
}

std::vector<double> margins(const VotingClassifier& f, const Dataset& data) {
  std::vector<double> out;
  out.reserve(data.m());
  for (std::size_t i = 0; i < data.m(); ++i) {
    out.push_back(static_cast<double>(data.label(i)) * score(f, data.features(i)));
  }
  return out;
}

double delta_second_moment(const VotingClassifier& f, std::span<const double> x) {
  const double fx = score(f, x);
  const auto& hyps = f.hypotheses();
  const auto& w = f.weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const double d = fx - hyps[i].predict(x);
    sum += w[i] * d * d;
  }
  return sum;
}

std::vector<double> per_point_second_moments(const VotingClassifier& f, const Dataset& data) {
  std::vector<double> out;
  out.reserve(data.m());
  for (std::size_t i = 0; i < data.m(); ++i) out.push_back(delta_second_moment(f, data.features(i)));
  return out;
}

}  // namespace refmargin
