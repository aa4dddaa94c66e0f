#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "refmargin/boosting.hpp"
#include "refmargin/ensemble.hpp"
#include "refmargin/tree.hpp"

namespace refmargin {

// Field names are documented in docs/model_schema.md.

nlohmann::json tree_to_json(const Tree& tree);
Tree tree_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const BoostConfig& config);
BoostConfig config_from_json(const nlohmann::json& j);

nlohmann::json raw_ensemble_to_json(const RawEnsemble& raw);
RawEnsemble raw_ensemble_from_json(const nlohmann::json& j);

/// A trained ensemble together with its normalized voting classifier.
struct Model {
  RawEnsemble raw;
  VotingClassifier classifier;
  std::vector<std::string> feature_names;
};

Model make_model(RawEnsemble raw, std::vector<std::string> feature_names);

/// Raw-ensemble document plus "scales", "weights" and "scale_total".
nlohmann::json model_to_json(const Model& model);
Model model_from_json(const nlohmann::json& j);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace refmargin
