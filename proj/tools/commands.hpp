#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "refmargin/bounds.hpp"
#include "refmargin/dataset.hpp"
#include "refmargin/ensemble.hpp"
#include "refmargin/lowerbound.hpp"

namespace refmargin::cli {

struct DataOptions {
  std::filesystem::path path;
  std::string label_column = "label";
  std::string positive_label = "1";
};

struct TrainOptions {
  DataOptions data;
  std::string algo = "both";  // ada | gbm | both
  int rounds = 200;
  int tree_size = 5;
  double learning_rate = 0.1;
  int min_leaf = 20;
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  std::size_t grid = 200;
  std::size_t bins = 40;
  std::filesystem::path out;
};

struct AnalyzeOptions {
  std::filesystem::path model;
  DataOptions train;
  DataOptions test;  // optional; empty path means "use train"
  std::size_t grid = 200;
  std::size_t bins = 40;
  std::filesystem::path out;
};

struct CompareOptions {
  std::filesystem::path model_a;
  std::filesystem::path model_b;
  DataOptions train;
  std::size_t grid = 200;
  std::filesystem::path out;
};

struct LbsimOptions {
  LBParams params;
  std::filesystem::path out;
};

struct SynthOptions {
  std::size_t n = 768;
  std::size_t dim = 8;
  double separation = 1.5;
  std::uint64_t seed = 1;
  std::filesystem::path out;
};

/// Each command returns the files it wrote, relative to its output directory.
std::vector<std::string> run_train(const TrainOptions& opts);
std::vector<std::string> run_analyze(const AnalyzeOptions& opts);
std::vector<std::string> run_compare(const CompareOptions& opts);
std::vector<std::string> run_lbsim(const LbsimOptions& opts);
void run_synth(const SynthOptions& opts);

struct CurveComparison {
  std::size_t defined = 0;  ///< grid points where both penalties are defined
  double a_lower_fraction = 0.0;
  double b_lower_fraction = 0.0;
};

struct Comparison {
  PenaltyCurve theta2_a, theta2_b, capital_n_a, capital_n_b;
  double moment_a = 0.0;
  double moment_b = 0.0;
  CurveComparison theta2;
  CurveComparison capital_n;
};

/// Penalty curves of both classifiers on one quantile grid. The N curves use
/// the moment statistic at r = lg(16m).
Comparison compare_classifiers(const VotingClassifier& a, const VotingClassifier& b, const Dataset& train,
                               std::span<const double> grid);

nlohmann::json lb_report(const LBParams& params);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace refmargin::cli
