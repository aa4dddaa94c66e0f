#pragma once

#include <cstdint>

#include "refmargin/dataset.hpp"
#include "refmargin/ensemble.hpp"

namespace refmargin {

struct SparseVote {
  Dataset data;
  VotingClassifier classifier;
  /// 1/round(1/theta_requested); equals the request when 1/theta is integral.
  double theta = 0.0;
  bool theta_adjusted = false;
};

/// K = 1/theta hypotheses with weight theta each. Point j belongs to group
/// j mod K; hypothesis i outputs y on its own group and 0 elsewhere, so every
/// margin is exactly theta.
///
/// Features are (group index, label sign): the hypotheses are 4-leaf trees
/// that isolate one group and then read the label feature.
SparseVote synthetic_sparse_vote(double theta, std::size_t m);

/// Two Gaussian clusters: labels alternate +1,-1 by row, all coordinates are
/// N(0,1) and the first is shifted by y*separation/2. Deterministic in seed.
Dataset synthetic_two_class(std::size_t n, std::size_t dim, double separation, std::uint64_t seed);

}  // namespace refmargin
