#include <fstream>
#include <sstream>

#include "json.hpp"
#include "xfer/boosting.hpp"
#include "xfer/common.hpp"

namespace xfer::gbt {

namespace {

nlohmann::json tree_to_json(const Tree& tree) {
  auto nodes = nlohmann::json::array();
  for (size_t n = 0; n < tree.size(); ++n) {
    nlohmann::json node;
    if (tree.is_leaf(static_cast<int>(n))) {
      node["leaf"] = to_hexfloat(tree.value[n]);
    } else {
      node["feature"] = tree.feature[n];
      node["threshold"] = to_hexfloat(tree.threshold[n]);
      node["missing_left"] = tree.missing_left[n] != 0;
      node["left"] = tree.left[n];
      node["right"] = tree.right[n];
    }
    node["cover"] = to_hexfloat(tree.cover[n]);
    nodes.push_back(node);
  }
  return nlohmann::json{{"nodes", nodes}};
}

Tree tree_from_json(const nlohmann::json& j) {
  Tree tree;
  for (const auto& node : j.at("nodes")) {
    if (node.contains("leaf")) {
      tree.feature.push_back(-1);
      tree.threshold.push_back(0.0);
      tree.missing_left.push_back(1);
      tree.left.push_back(-1);
      tree.right.push_back(-1);
      tree.value.push_back(parse_double(node.at("leaf").get<std::string>()));
    } else {
      tree.feature.push_back(node.at("feature").get<int>());
      tree.threshold.push_back(parse_double(node.at("threshold").get<std::string>()));
      tree.missing_left.push_back(node.at("missing_left").get<bool>() ? 1 : 0);
      tree.left.push_back(node.at("left").get<int>());
      tree.right.push_back(node.at("right").get<int>());
      tree.value.push_back(0.0);
    }
    tree.cover.push_back(parse_double(node.at("cover").get<std::string>()));
  }
  const int n = static_cast<int>(tree.size());
  if (n == 0) throw DataError("gbrank: tree with no nodes");
  for (int i = 0; i < n; ++i) {
    if (tree.is_leaf(i)) continue;
    if (tree.left[static_cast<size_t>(i)] < 0 || tree.left[static_cast<size_t>(i)] >= n ||
        tree.right[static_cast<size_t>(i)] < 0 || tree.right[static_cast<size_t>(i)] >= n) {
      throw DataError("gbrank: node child index out of range");
    }
  }
  return tree;
}

}  // namespace

std::string serialize_model(const Ensemble& model) {
  nlohmann::json j;
  j["format"] = "gbrank.v1";
  j["objective"] = std::string(objective_name(model.objective));
  j["base_score"] = to_hexfloat(model.base_score);
  j["learning_rate"] = to_hexfloat(model.learning_rate);
  j["feature_names"] = model.feature_names;
  j["config"] = {
      {"num_trees", model.config.num_trees},
      {"max_leaves", model.config.max_leaves},
      {"learning_rate", to_hexfloat(model.config.learning_rate)},
      {"min_samples_per_leaf", model.config.min_samples_per_leaf},
      {"l2_leaf_reg", to_hexfloat(model.config.l2_leaf_reg)},
      {"sigma", to_hexfloat(model.config.sigma)},
      {"ndcg_truncation", model.config.ndcg_truncation},
      {"seed", model.config.seed},
  };
  auto trees = nlohmann::json::array();
  for (const Tree& t : model.trees) trees.push_back(tree_to_json(t));
  j["trees"] = trees;
  return j.dump(1) + "\n";
}

Ensemble parse_model(const std::string& content) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(content);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("gbrank: malformed document: ") + e.what());
  }
  if (j.value("format", "") != "gbrank.v1") {
    throw DataError("gbrank: expected format gbrank.v1");
  }
  Ensemble model;
  const std::string obj = j.at("objective").get<std::string>();
  if (obj == "regression") {
    model.objective = Objective::kRegression;
  } else if (obj == "lambdarank") {
    model.objective = Objective::kLambdaRank;
  } else {
    throw DataError("gbrank: unknown objective: " + obj);
  }
  model.base_score = parse_double(j.at("base_score").get<std::string>());
  model.learning_rate = parse_double(j.at("learning_rate").get<std::string>());
  for (const auto& name : j.value("feature_names", nlohmann::json::array())) {
    model.feature_names.push_back(name.get<std::string>());
  }
  const auto& cfg = j.at("config");
  model.config.num_trees = cfg.at("num_trees").get<int>();
  model.config.max_leaves = cfg.at("max_leaves").get<int>();
  model.config.learning_rate = parse_double(cfg.at("learning_rate").get<std::string>());
  model.config.min_samples_per_leaf = cfg.at("min_samples_per_leaf").get<int>();
  model.config.l2_leaf_reg = parse_double(cfg.at("l2_leaf_reg").get<std::string>());
  model.config.sigma = parse_double(cfg.at("sigma").get<std::string>());
  model.config.ndcg_truncation = cfg.at("ndcg_truncation").get<int>();
  model.config.seed = cfg.at("seed").get<std::uint64_t>();
  for (const auto& t : j.at("trees")) model.trees.push_back(tree_from_json(t));
  return model;
}

void save_model(const Ensemble& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model: " + path.string());
  out << serialize_model(model);
}

Ensemble load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace xfer::gbt
