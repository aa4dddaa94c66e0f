#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "refmargin/dataset.hpp"
#include "refmargin/tree.hpp"

namespace refmargin {

enum class Algo { AdaBoost, GradientBoost };

std::string_view to_string(Algo algo) noexcept;
Algo algo_from_string(std::string_view name);

struct BoostConfig {
  int rounds = 200;
  double learning_rate = 0.1;  // gradient booster only
  GrowthConfig growth{};
  std::uint64_t seed = 0;

  void validate() const;
};

/// Unnormalized ensemble F(x) = sum_t coefficients[t] * trees[t](x).
struct RawEnsemble {
  Algo algo = Algo::AdaBoost;
  std::vector<Tree> trees;
  std::vector<double> coefficients;
  /// AdaBoost: running product of 2*sqrt(eps*(1-eps)) after each round.
  /// Gradient booster: mean logistic loss after each round.
  std::vector<double> loss_trace;
  /// AdaBoost only: per-round clamped weighted error.
  std::vector<double> round_errors;
  /// Set when AdaBoost stopped early because a round's weighted error
  /// reached 0.5; the ensemble then holds the rounds completed before it.
  bool weak_learner_stall = false;
  BoostConfig config{};

  [[nodiscard]] std::size_t size() const noexcept { return trees.size(); }
  [[nodiscard]] double raw_score(std::span<const double> x) const;
  /// First `rounds` trees and coefficients.
  [[nodiscard]] RawEnsemble prefix(std::size_t rounds) const;
};

inline constexpr double kAdaBoostEpsilonFloor = 1e-12;
inline constexpr double kLeafValueLimit = 10.0;

/// Discrete AdaBoost over weighted-Gini classification trees.
RawEnsemble train_adaboost(const Dataset& train, const BoostConfig& config);

/// Newton gradient booster on the logistic loss ln(1 + exp(-y F)).
RawEnsemble train_gradient_booster(const Dataset& train, const BoostConfig& config);

RawEnsemble train_model(Algo algo, const Dataset& train, const BoostConfig& config);

/// Numerically stable ln(1 + exp(-z)).
double logistic_loss(double margin) noexcept;

}  // namespace refmargin
