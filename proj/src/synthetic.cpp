#include "refmargin/synthetic.hpp"

#include <cmath>
#include <string>

#include "refmargin/error.hpp"
#include "refmargin/rng.hpp"

namespace refmargin {

namespace {

// Outputs the label feature's sign on group `group`, 0 elsewhere.
Tree group_indicator_tree(std::size_t group) {
  const double g = static_cast<double>(group);
  std::vector<TreeNode> nodes(7);
  nodes[0] = {0, g - 0.5, 1, 2, 0.0};  // below the group -> 0
  nodes[1] = {-1, 0.0, -1, -1, 0.0};
  nodes[2] = {0, g + 0.5, 3, 4, 0.0};  // above the group -> 0
  nodes[3] = {1, 0.0, 5, 6, 0.0};      // inside: read label feature
  nodes[4] = {-1, 0.0, -1, -1, 0.0};
  nodes[5] = {-1, 0.0, -1, -1, -1.0};
  nodes[6] = {-1, 0.0, -1, -1, 1.0};
  return Tree(std::move(nodes), 2);
}

}  // namespace

SparseVote synthetic_sparse_vote(double theta, std::size_t m) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw Error(ErrorCode::InvalidTheta, "theta must lie in (0,1], got " + std::to_string(theta));
  }
  if (m < 1) throw Error(ErrorCode::InvalidParams, "need at least one point");
  const double inv = 1.0 / theta;
  const auto k = static_cast<std::size_t>(std::llround(inv));
  const double used = 1.0 / static_cast<double>(k);
  const bool adjusted = std::abs(inv - static_cast<double>(k)) > 1e-9;

  std::vector<Sample> samples;
  samples.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const int y = (j % 2 == 0) ? 1 : -1;
    samples.push_back({{static_cast<double>(j % k), static_cast<double>(y)}, y});
  }
  std::vector<BaseHypothesis> hyps;
  hyps.reserve(k);
  for (std::size_t i = 0; i < k; ++i) hyps.push_back({group_indicator_tree(i), 1.0});
  std::vector<double> weights(k, used);
  return {Dataset(std::move(samples), {"group", "label_sign"}), VotingClassifier(std::move(hyps), std::move(weights)),
          used, adjusted};
}

Dataset synthetic_two_class(std::size_t n, std::size_t dim, double separation, std::uint64_t seed) {
  if (n < 2 || dim < 1 || !std::isfinite(separation)) {
    throw Error(ErrorCode::InvalidParams, "synthetic_two_class needs n >= 2, dim >= 1, finite separation");
  }
  Rng rng(seed);
  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = (i % 2 == 0) ? 1 : -1;
    std::vector<double> x(dim);
    for (auto& v : x) v = rng.normal();
    x[0] += static_cast<double>(y) * separation / 2.0;
    samples.push_back({std::move(x), y});
  }
  std::vector<std::string> names;
  for (std::size_t f = 0; f < dim; ++f) names.push_back("x" + std::to_string(f));
  return Dataset(std::move(samples), std::move(names));
}

}  // namespace refmargin
