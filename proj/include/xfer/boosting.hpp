#ifndef XFER_BOOSTING_HPP_
#define XFER_BOOSTING_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace xfer::gbt {

// Row-major dense matrix; NaN encodes a missing feature value.
struct DataMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  DataMatrix() = default;
  DataMatrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double at(size_t r, size_t c) const { return data[r * cols + c]; }
  double& at(size_t r, size_t c) { return data[r * cols + c]; }
  std::span<const double> row(size_t r) const {
    return std::span<const double>(data).subspan(r * cols, cols);
  }
};

// One regression tree in flat arrays. Internal nodes have feature >= 0;
// leaves have feature == -1 and carry the value. cover is the number of
// training rows that reached the node (needed by the explainer).
struct Tree {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<std::uint8_t> missing_left;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> value;
  std::vector<double> cover;

  int add_leaf(double leaf_value, double leaf_cover);
  bool is_leaf(int node) const { return feature[node] < 0; }
  size_t size() const { return feature.size(); }

  // Child the row is routed to: left when x < threshold, right otherwise,
  // missing values follow missing_left.
  int route(int node, std::span<const double> row) const;
  int leaf_for(std::span<const double> row) const;
  double predict(std::span<const double> row) const;
  double expected_value() const;  // cover-weighted mean over leaves
  int num_leaves() const;
  int max_depth() const;
};

struct TrainConfig {
  int num_trees = 100;
  int max_leaves = 16;
  double learning_rate = 0.1;
  int min_samples_per_leaf = 1;
  double l2_leaf_reg = 0.0;
  double sigma = 1.0;       // LambdaRank sharpness
  int ndcg_truncation = 3;  // K inside |delta NDCG|
  std::uint64_t seed = 0;

  void validate() const;
};

enum class Objective { kRegression, kLambdaRank };
std::string_view objective_name(Objective o);

struct Ensemble {
  Objective objective = Objective::kRegression;
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<Tree> trees;
  std::vector<std::string> feature_names;
  TrainConfig config;

  double predict(std::span<const double> row) const;
  std::vector<double> predict_many(const DataMatrix& x) const;
};

// Greedy best-first induction of one tree from second-order statistics:
// gain = 1/2 [GL^2/(HL+l2) + GR^2/(HR+l2) - G^2/(H+l2)], leaf = -G/(H+l2),
// exact split search over midpoints of sorted unique values, gain ties
// broken by (lower feature index, lower threshold). Rows with a missing
// split value follow the child with more training weight.
Tree fit_tree(std::span<const double> gradients, std::span<const double> hessians,
              const DataMatrix& x, const TrainConfig& config);

Ensemble train_regression(const DataMatrix& x, std::span<const double> targets,
                          const TrainConfig& config,
                          std::vector<std::string> feature_names = {});

// One ranking query: rows are candidate sources for a single target.
struct QueryGroup {
  std::string query_id;
  std::vector<std::vector<double>> rows;
  std::vector<int> grades;
  std::vector<double> raw_scores;
};

// Burges-style pairwise lambdas for one group at the current scores:
// rho = 1/(1+exp(sigma (s_i - s_j))) for grade_i > grade_j, weighted by
// the NDCG@K change from swapping i and j in the predicted order.
void compute_lambdas(std::span<const int> grades, std::span<const double> scores,
                     const TrainConfig& config, std::span<double> gradients,
                     std::span<double> hessians);

Ensemble train_lambdarank(const std::vector<QueryGroup>& groups,
                          const TrainConfig& config,
                          std::vector<std::string> feature_names = {});

// gbrank.v1 model document; all reals stored as hex-floats so reloading
// reproduces bit-identical predictions.
void save_model(const Ensemble& model, const std::filesystem::path& path);
Ensemble load_model(const std::filesystem::path& path);
std::string serialize_model(const Ensemble& model);
Ensemble parse_model(const std::string& content);

}  // namespace xfer::gbt

#endif  // XFER_BOOSTING_HPP_
