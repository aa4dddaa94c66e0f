#include "refmargin/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "refmargin/error.hpp"

namespace refmargin {

std::string_view to_string(Algo algo) noexcept {
  return algo == Algo::AdaBoost ? "ada" : "gbm";
}

Algo algo_from_string(std::string_view name) {
  if (name == "ada" || name == "adaboost") return Algo::AdaBoost;
  if (name == "gbm" || name == "gradient") return Algo::GradientBoost;
  throw Error(ErrorCode::InvalidConfig, "unknown algorithm '" + std::string(name) + "'");
}

void BoostConfig::validate() const {
  if (rounds < 1) throw Error(ErrorCode::InvalidConfig, "rounds must be at least 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "learning_rate must lie in (0,1]");
  }
  growth.validate();
}

double RawEnsemble::raw_score(std::span<const double> x) const {
  double sum = 0.0;
  for (std::size_t t = 0; t < trees.size(); ++t) sum += coefficients[t] * trees[t].predict(x);
  return sum;
}

RawEnsemble RawEnsemble::prefix(std::size_t rounds) const {
  if (rounds > trees.size()) {
    throw Error(ErrorCode::StageOutOfRange,
                "stage " + std::to_string(rounds) + " exceeds " + std::to_string(trees.size()) + " trained rounds");
  }
  RawEnsemble out;
  out.algo = algo;
  out.config = config;
  out.trees.assign(trees.begin(), trees.begin() + static_cast<std::ptrdiff_t>(rounds));
  out.coefficients.assign(coefficients.begin(), coefficients.begin() + static_cast<std::ptrdiff_t>(rounds));
  const auto keep = [rounds](const std::vector<double>& v) {
    return std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(rounds, v.size())));
  };
  out.loss_trace = keep(loss_trace);
  out.round_errors = keep(round_errors);
  return out;
}

double logistic_loss(double margin) noexcept {
  // ln(1 + e^{-z}) = max(-z, 0) + ln(1 + e^{-|z|})
  return std::max(-margin, 0.0) + std::log1p(std::exp(-std::abs(margin)));
}

RawEnsemble train_adaboost(const Dataset& train, const BoostConfig& config) {
  config.validate();
  if (config.growth.mode != GrowthMode::WeightedClassification) {
    throw Error(ErrorCode::InvalidConfig, "AdaBoost requires weighted_classification growth");
  }
  const auto m = train.m();
  RawEnsemble ens;
  ens.algo = Algo::AdaBoost;
  ens.config = config;

  std::vector<double> weights(m, 1.0 / static_cast<double>(m));
  std::vector<double> pred(m);
  double bound = 1.0;
  for (int t = 0; t < config.rounds; ++t) {
    Tree tree = fit_classification_tree(train, weights, config.growth);
    double eps = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      pred[i] = tree.predict(train.features(i));
      if (pred[i] != static_cast<double>(train.label(i))) eps += weights[i];
    }
    if (eps >= 0.5) {
      ens.weak_learner_stall = true;
      break;
    }
    const double clamped = std::clamp(eps, kAdaBoostEpsilonFloor, 1.0 - kAdaBoostEpsilonFloor);
    const double alpha = 0.5 * std::log((1.0 - clamped) / clamped);

    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      weights[i] *= std::exp(-alpha * static_cast<double>(train.label(i)) * pred[i]);
      total += weights[i];
    }
    for (auto& w : weights) w /= total;

    bound *= 2.0 * std::sqrt(clamped * (1.0 - clamped));
    ens.trees.push_back(std::move(tree));
    ens.coefficients.push_back(alpha);
    ens.loss_trace.push_back(bound);
    ens.round_errors.push_back(clamped);
  }
  return ens;
}

RawEnsemble train_gradient_booster(const Dataset& train, const BoostConfig& config) {
  config.validate();
  if (config.growth.mode != GrowthMode::GradientNewton) {
    throw Error(ErrorCode::InvalidConfig, "gradient booster requires gradient_newton growth");
  }
  const auto m = train.m();
  RawEnsemble ens;
  ens.algo = Algo::GradientBoost;
  ens.config = config;

  std::vector<double> score(m, 0.0);
  std::vector<double> grad(m);
  std::vector<double> hess(m);
  for (int t = 0; t < config.rounds; ++t) {
    for (std::size_t i = 0; i < m; ++i) {
      const double y = static_cast<double>(train.label(i));
      const double z = y * score[i];
      // sigma(-z) and sigma(z) without overflow.
      const double e = std::exp(-std::abs(z));
      const double s_neg = z >= 0.0 ? e / (1.0 + e) : 1.0 / (1.0 + e);
      const double s_pos = z >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
      grad[i] = -y * s_neg;
      hess[i] = std::max(s_pos * s_neg, std::numeric_limits<double>::min());
    }
    Tree tree = fit_regression_tree(train, grad, hess, config.growth);
    tree.clamp_leaf_values(kLeafValueLimit);
    double loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      score[i] += config.learning_rate * tree.predict(train.features(i));
      loss += logistic_loss(static_cast<double>(train.label(i)) * score[i]);
    }
    ens.trees.push_back(std::move(tree));
    ens.coefficients.push_back(config.learning_rate);
    ens.loss_trace.push_back(loss / static_cast<double>(m));
  }
  return ens;
}

RawEnsemble train_model(Algo algo, const Dataset& data, const BoostConfig& config) {
  return algo == Algo::AdaBoost ? train_adaboost(data, config) : train_gradient_booster(data, config);
}

}  // namespace refmargin
