#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace refmargin {

/// One labeled example. Labels are always -1 or +1.
struct Sample {
  std::vector<double> features;
  int label = 1;
};

/// Immutable binary-classification data set.
///
/// Construction validates that there is at least one sample, every label is
/// in {-1,+1}, and every sample has the same number of features as there are
/// feature names.
class Dataset {
 public:
  Dataset(std::vector<Sample> samples, std::vector<std::string> feature_names);

  [[nodiscard]] std::size_t m() const noexcept { return samples_.size(); }
  [[nodiscard]] std::size_t n_features() const noexcept { return feature_names_.size(); }
  [[nodiscard]] const std::vector<Sample>& samples() const noexcept { return samples_; }
  [[nodiscard]] const Sample& operator[](std::size_t i) const { return samples_[i]; }
  [[nodiscard]] const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  [[nodiscard]] std::span<const double> features(std::size_t i) const { return samples_[i].features; }
  [[nodiscard]] int label(std::size_t i) const { return samples_[i].label; }

  /// Rows at the given indices, in the order given.
  [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<Sample> samples_;
  std::vector<std::string> feature_names_;
};

/// Reads a headered CSV. Rows whose label equals `positive_label` become +1,
/// the one other label value becomes -1; every other column must be numeric.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const std::string& positive_label);

/// Writes a headered CSV with the label column last, labels written as 1/-1.
void write_csv(const Dataset& data, const std::filesystem::path& path,
               const std::string& label_column = "label");

struct SplitSpec {
  std::uint64_t seed = 0;
  double fraction = 0.5;
};

/// Random train/test partition. The train part has ceil(fraction*m) rows.
/// Rows are permuted with a Fisher-Yates shuffle driven by Rng(seed) and
/// each part keeps the input's row order. No stratification.
std::pair<Dataset, Dataset> split_train_test(const Dataset& data, const SplitSpec& spec);

/// Row indices of the train part chosen by split_train_test, sorted.
std::vector<std::size_t> split_train_indices(std::size_t m, const SplitSpec& spec);

}  // namespace refmargin
