#pragma once

// Generators and brute-force oracles shared by the test suites. Nothing in
// here calls the code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <vector>

#include "refmargin/boosting.hpp"
#include "refmargin/dataset.hpp"
#include "refmargin/ensemble.hpp"
#include "refmargin/rng.hpp"
#include "refmargin/tree.hpp"

namespace testing {

using refmargin::Dataset;
using refmargin::Rng;
using refmargin::Sample;
using refmargin::Tree;
using refmargin::TreeNode;

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

inline Dataset random_dataset(Rng& rng, std::size_t m, std::size_t dim, bool integer_features = false) {
  std::vector<Sample> rows;
  std::vector<std::string> names;
  for (std::size_t f = 0; f < dim; ++f) names.push_back("f" + std::to_string(f));
  for (std::size_t i = 0; i < m; ++i) {
    Sample s;
    for (std::size_t f = 0; f < dim; ++f) {
      s.features.push_back(integer_features ? static_cast<double>(rng.uniform_index(5)) : uniform(rng, -2.0, 2.0));
    }
    s.label = rng.uniform_index(2) == 0 ? -1 : 1;
    rows.push_back(std::move(s));
  }
  return Dataset(std::move(rows), std::move(names));
}

/// Random tree built by repeatedly splitting a random leaf.
inline Tree random_tree(Rng& rng, std::size_t dim, int leaves, double value_lo, double value_hi) {
  std::vector<TreeNode> nodes(1);
  std::vector<int> open{0};
  for (int k = 1; k < leaves; ++k) {
    const auto pick = rng.uniform_index(open.size());
    const int at = open[pick];
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
    const int left = static_cast<int>(nodes.size());
    nodes[static_cast<std::size_t>(at)].feature = static_cast<int>(rng.uniform_index(dim));
    nodes[static_cast<std::size_t>(at)].threshold = uniform(rng, -1.5, 1.5);
    nodes[static_cast<std::size_t>(at)].left = left;
    nodes[static_cast<std::size_t>(at)].right = left + 1;
    nodes.emplace_back();
    nodes.emplace_back();
    open.push_back(left);
    open.push_back(left + 1);
  }
  for (auto& n : nodes) {
    if (n.is_leaf()) n.value = uniform(rng, value_lo, value_hi);
  }
  return Tree(std::move(nodes), dim);
}

inline refmargin::RawEnsemble random_raw_ensemble(Rng& rng, std::size_t dim, std::size_t size) {
  refmargin::RawEnsemble raw;
  raw.algo = refmargin::Algo::GradientBoost;
  for (std::size_t t = 0; t < size; ++t) {
    const double span = uniform(rng, 0.01, 5.0);
    raw.trees.push_back(random_tree(rng, dim, 1 + static_cast<int>(rng.uniform_index(6)), -span, span));
    raw.coefficients.push_back(uniform(rng, 0.01, 2.0));
  }
  return raw;
}

inline std::vector<double> random_point(Rng& rng, std::size_t dim) {
  std::vector<double> x(dim);
  for (auto& v : x) v = uniform(rng, -2.0, 2.0);
  return x;
}

/// sum_h w_h * h(x) recomputed straight from trees and scales.
inline double direct_vote(const refmargin::VotingClassifier& f, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    s += f.weights()[i] * f.hypotheses()[i].tree.predict(x) / f.hypotheses()[i].scale;
  }
  return s;
}

}  // namespace testing
