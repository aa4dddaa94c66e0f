#include "refmargin/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "refmargin/error.hpp"
#include "refmargin/rng.hpp"

namespace refmargin {

namespace {

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string location(std::size_t row, std::size_t column) {
  return "row " + std::to_string(row) + ", column " + std::to_string(column);
}

}  // namespace

Dataset::Dataset(std::vector<Sample> samples, std::vector<std::string> feature_names)
    : samples_(std::move(samples)), feature_names_(std::move(feature_names)) {
  if (samples_.empty()) throw Error(ErrorCode::EmptyData, "dataset has no samples");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (s.label != 1 && s.label != -1) {
      throw Error(ErrorCode::NonBinaryLabels, "sample " + std::to_string(i) + " has label " +
                                                  std::to_string(s.label) + ", expected -1 or +1");
    }
    if (s.features.size() != feature_names_.size()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "sample " + std::to_string(i) + " has " + std::to_string(s.features.size()) +
                      " features, expected " + std::to_string(feature_names_.size()));
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<Sample> rows;
  rows.reserve(indices.size());
  for (auto i : indices) rows.push_back(samples_.at(i));
  return Dataset(std::move(rows), feature_names_);
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const std::string& positive_label) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());

  std::string line;
  std::size_t row = 0;
  // Skip leading blank lines; the first non-blank line is the header.
  bool have_header = false;
  while (std::getline(in, line)) {
    ++row;
    if (!trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "empty file " + path.string() + " (row 0, column 0)");

  const auto header = split_row(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw Error(ErrorCode::MissingColumn, "label column '" + label_column + "' not in header of " + path.string());
  }
  const auto label_idx = static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_idx) names.push_back(header[c]);
  }

  std::vector<std::vector<double>> features;
  std::vector<std::string> raw_labels;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::ParseError, "expected " + std::to_string(header.size()) + " cells, got " +
                                             std::to_string(cells.size()) + " at " +
                                             location(row, std::min(cells.size(), header.size())));
    }
    std::vector<double> values;
    values.reserve(names.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_idx) continue;
      const auto& cell = cells[c];
      double v = 0.0;
      const auto* begin = cell.data();
      const auto* end = cell.data() + cell.size();
      const auto [ptr, ec] = std::from_chars(begin, end, v);
      if (cell.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw Error(ErrorCode::ParseError, "non-numeric value '" + cell + "' at " + location(row, c));
      }
      values.push_back(v);
    }
    features.push_back(std::move(values));
    raw_labels.push_back(cells[label_idx]);
  }
  if (features.empty()) throw Error(ErrorCode::ParseError, "no data rows in " + path.string() + " (row " + std::to_string(row) + ", column 0)");

  std::vector<std::string> distinct = raw_labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() != 2) {
    throw Error(ErrorCode::NonBinaryLabels,
                "label column '" + label_column + "' has " + std::to_string(distinct.size()) + " distinct values");
  }
  if (std::find(distinct.begin(), distinct.end(), positive_label) == distinct.end()) {
    throw Error(ErrorCode::NonBinaryLabels, "positive label '" + positive_label + "' does not occur");
  }

  std::vector<Sample> samples;
  samples.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    samples.push_back({std::move(features[i]), raw_labels[i] == positive_label ? 1 : -1});
  }
  return Dataset(std::move(samples), std::move(names));
}

void write_csv(const Dataset& data, const std::filesystem::path& path, const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& name : data.feature_names()) out << name << ',';
  out << label_column << '\n';
  char buf[64];
  for (const auto& s : data.samples()) {
    for (double v : s.features) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out.write(buf, res.ptr - buf);
      out << ',';
    }
    out << s.label << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::vector<std::size_t> split_train_indices(std::size_t m, const SplitSpec& spec) {
  if (!(spec.fraction > 0.0 && spec.fraction < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "split fraction must lie in (0,1)");
  }
  if (m < 2) throw Error(ErrorCode::TooFewSamples, "need at least 2 samples to split");
  const auto n_train = static_cast<std::size_t>(std::ceil(spec.fraction * static_cast<double>(m)));
  if (n_train >= m) {
    throw Error(ErrorCode::TooFewSamples, "split of " + std::to_string(m) + " rows leaves an empty test part");
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  for (std::size_t i = m - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_index(i + 1));
    std::swap(order[i], order[j]);
  }
  order.resize(n_train);
  std::sort(order.begin(), order.end());
  return order;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data, const SplitSpec& spec) {
  const auto train_idx = split_train_indices(data.m(), spec);
  std::vector<std::size_t> test_idx;
  test_idx.reserve(data.m() - train_idx.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < data.m(); ++i) {
    if (next < train_idx.size() && train_idx[next] == i) {
      ++next;
    } else {
      test_idx.push_back(i);
    }
  }
  return {data.subset(train_idx), data.subset(test_idx)};
}

}  // namespace refmargin
