#include "refmargin/serialize.hpp"

#include <fstream>

#include "refmargin/error.hpp"

namespace refmargin {

using nlohmann::json;

namespace {

template <class T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) throw Error(ErrorCode::SchemaError, std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("bad field '") + name + "': " + e.what());
  }
}

}  // namespace

json tree_to_json(const Tree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes()) {
    if (n.is_leaf()) {
      nodes.push_back({{"value", n.value}});
    } else {
      nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
    }
  }
  return {{"n_features", tree.n_features()}, {"nodes", std::move(nodes)}};
}

Tree tree_from_json(const json& j) {
  const auto n_features = field<std::size_t>(j, "n_features");
  const auto& arr = j.at("nodes");
  if (!arr.is_array()) throw Error(ErrorCode::SchemaError, "'nodes' must be an array");
  std::vector<TreeNode> nodes;
  nodes.reserve(arr.size());
  for (const auto& item : arr) {
    TreeNode n;
    if (item.contains("value")) {
      n.value = field<double>(item, "value");
    } else {
      n.feature = field<int>(item, "feature");
      n.threshold = field<double>(item, "threshold");
      n.left = field<int>(item, "left");
      n.right = field<int>(item, "right");
      if (n.feature < 0) throw Error(ErrorCode::SchemaError, "negative feature index");
    }
    nodes.push_back(n);
  }
  return Tree(std::move(nodes), n_features);
}

json config_to_json(const BoostConfig& c) {
  return {{"rounds", c.rounds},
          {"learning_rate", c.learning_rate},
          {"max_leaves", c.growth.max_leaves},
          {"min_leaf", c.growth.min_leaf},
          {"lambda_l2", c.growth.lambda_l2},
          {"mode", c.growth.mode == GrowthMode::WeightedClassification ? "weighted_classification" : "gradient_newton"},
          {"seed", c.seed}};
}

BoostConfig config_from_json(const json& j) {
  BoostConfig c;
  c.rounds = field<int>(j, "rounds");
  c.learning_rate = field<double>(j, "learning_rate");
  c.growth.max_leaves = field<int>(j, "max_leaves");
  c.growth.min_leaf = field<int>(j, "min_leaf");
  c.growth.lambda_l2 = field<double>(j, "lambda_l2");
  const auto mode = field<std::string>(j, "mode");
  if (mode == "weighted_classification") {
    c.growth.mode = GrowthMode::WeightedClassification;
  } else if (mode == "gradient_newton") {
    c.growth.mode = GrowthMode::GradientNewton;
  } else {
    throw Error(ErrorCode::SchemaError, "unknown growth mode '" + mode + "'");
  }
  c.seed = field<std::uint64_t>(j, "seed");
  return c;
}

json raw_ensemble_to_json(const RawEnsemble& raw) {
  json trees = json::array();
  for (const auto& t : raw.trees) trees.push_back(tree_to_json(t));
  return {{"algo", to_string(raw.algo)},
          {"coefficients", raw.coefficients},
          {"trees", std::move(trees)},
          {"loss_trace", raw.loss_trace},
          {"round_errors", raw.round_errors},
          {"weak_learner_stall", raw.weak_learner_stall},
          {"config", config_to_json(raw.config)}};
}

RawEnsemble raw_ensemble_from_json(const json& j) {
  RawEnsemble raw;
  raw.algo = algo_from_string(field<std::string>(j, "algo"));
  raw.coefficients = field<std::vector<double>>(j, "coefficients");
  for (const auto& t : j.at("trees")) raw.trees.push_back(tree_from_json(t));
  if (raw.trees.size() != raw.coefficients.size()) {
    throw Error(ErrorCode::SchemaError, "tree and coefficient counts differ");
  }
  if (j.contains("loss_trace")) raw.loss_trace = field<std::vector<double>>(j, "loss_trace");
  if (j.contains("round_errors")) raw.round_errors = field<std::vector<double>>(j, "round_errors");
  if (j.contains("weak_learner_stall")) raw.weak_learner_stall = field<bool>(j, "weak_learner_stall");
  if (j.contains("config")) raw.config = config_from_json(j.at("config"));
  return raw;
}

Model make_model(RawEnsemble raw, std::vector<std::string> feature_names) {
  auto classifier = normalize(raw);
  return {std::move(raw), std::move(classifier), std::move(feature_names)};
}

json model_to_json(const Model& model) {
  json j = raw_ensemble_to_json(model.raw);
  std::vector<double> scales;
  for (const auto& h : model.classifier.hypotheses()) scales.push_back(h.scale);
  j["format"] = "refmargin-model";
  j["version"] = 1;
  j["n_features"] = model.classifier.n_features();
  j["feature_names"] = model.feature_names;
  j["scales"] = scales;
  j["weights"] = model.classifier.weights();
  j["scale_total"] = model.classifier.scale_total();
  return j;
}

Model model_from_json(const json& j) {
  if (j.value("format", "") != "refmargin-model") throw Error(ErrorCode::SchemaError, "not a refmargin model document");
  RawEnsemble raw = raw_ensemble_from_json(j);
  const auto scales = field<std::vector<double>>(j, "scales");
  const auto weights = field<std::vector<double>>(j, "weights");
  if (scales.size() != raw.trees.size()) throw Error(ErrorCode::SchemaError, "scale count differs from tree count");
  std::vector<BaseHypothesis> hyps;
  hyps.reserve(raw.trees.size());
  for (std::size_t i = 0; i < raw.trees.size(); ++i) hyps.push_back({raw.trees[i], scales[i]});
  VotingClassifier classifier(std::move(hyps), weights, field<double>(j, "scale_total"));
  auto names = j.contains("feature_names") ? field<std::vector<std::string>>(j, "feature_names")
                                           : std::vector<std::string>{};
  if (!names.empty() && names.size() != classifier.n_features()) {
    throw Error(ErrorCode::SchemaError, "feature_names length differs from n_features");
  }
  return {std::move(raw), std::move(classifier), std::move(names)};
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << model_to_json(model).dump(1) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace refmargin
