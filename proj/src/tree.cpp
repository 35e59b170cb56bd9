#include <algorithm>
#include <cmath>
#include <queue>

#include "xfer/boosting.hpp"
#include "xfer/common.hpp"

namespace xfer::gbt {

int Tree::add_leaf(double leaf_value, double leaf_cover) {
  feature.push_back(-1);
  threshold.push_back(0.0);
  missing_left.push_back(1);
  left.push_back(-1);
  right.push_back(-1);
  value.push_back(leaf_value);
  cover.push_back(leaf_cover);
  return static_cast<int>(feature.size()) - 1;
}

int Tree::route(int node, std::span<const double> row) const {
  const double x = row[static_cast<size_t>(feature[node])];
  if (std::isnan(x)) return missing_left[node] ? left[node] : right[node];
  return x < threshold[node] ? left[node] : right[node];
}

int Tree::leaf_for(std::span<const double> row) const {
  int node = 0;
  while (!is_leaf(node)) node = route(node, row);
  return node;
}

double Tree::predict(std::span<const double> row) const {
  return value[leaf_for(row)];
}

double Tree::expected_value() const {
  double total = cover[0];
  if (total <= 0) return value[0];
  double sum = 0;
  for (size_t n = 0; n < size(); ++n) {
    if (is_leaf(static_cast<int>(n))) sum += cover[n] * value[n];
  }
  return sum / total;
}

int Tree::num_leaves() const {
  int count = 0;
  for (size_t n = 0; n < size(); ++n) {
    if (is_leaf(static_cast<int>(n))) ++count;
  }
  return count;
}

int Tree::max_depth() const {
  std::vector<std::pair<int, int>> stack = {{0, 0}};
  int deepest = 0;
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, depth);
    if (!is_leaf(node)) {
      stack.push_back({left[node], depth + 1});
      stack.push_back({right[node], depth + 1});
    }
  }
  return deepest;
}

void TrainConfig::validate() const {
  if (num_trees < 1) throw DataError("config: num_trees must be >= 1");
  if (max_leaves < 2) throw DataError("config: max_leaves must be >= 2");
  if (!(learning_rate > 0)) throw DataError("config: learning_rate must be > 0");
  if (min_samples_per_leaf < 1) throw DataError("config: min_samples_per_leaf must be >= 1");
  if (l2_leaf_reg < 0) throw DataError("config: l2_leaf_reg must be >= 0");
  if (!(sigma > 0)) throw DataError("config: sigma must be > 0");
  if (ndcg_truncation < 1) throw DataError("config: ndcg_truncation must be >= 1");
}

std::string_view objective_name(Objective o) {
  return o == Objective::kRegression ? "regression" : "lambdarank";
}

double Ensemble::predict(std::span<const double> row) const {
  if (!feature_names.empty() && row.size() != feature_names.size()) {
    throw DataError("predict: row has " + std::to_string(row.size()) +
                    " features, model expects " + std::to_string(feature_names.size()));
  }
  double sum = 0;
  for (const Tree& tree : trees) sum += tree.predict(row);
  return base_score + learning_rate * sum;
}

std::vector<double> Ensemble::predict_many(const DataMatrix& x) const {
  std::vector<double> out(x.rows);
  for (size_t r = 0; r < x.rows; ++r) out[r] = predict(x.row(r));
  return out;
}

namespace {

struct SplitCandidate {
  bool valid = false;
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  bool missing_left = true;
};

struct LeafState {
  int id = 0;  // creation order, used for deterministic tie-breaking
  int node = -1;
  std::vector<int> rows;
  double grad_sum = 0.0;
  double hess_sum = 0.0;
  SplitCandidate split;
};

double leaf_weight(double g, double h, double l2) {
  const double denom = h + l2;
  return denom > 0 ? -g / denom : 0.0;
}

double gain_term(double g, double h, double l2) {
  const double denom = h + l2;
  return denom > 0 ? g * g / denom : 0.0;
}

// Exact split scan for one leaf. Rows with a missing value on the probed
// feature are excluded from the scan and later routed to the heavier
// child; the gain is computed over the non-missing part only.
SplitCandidate find_best_split(const LeafState& leaf,
                               std::span<const double> gradients,
                               std::span<const double> hessians,
                               const DataMatrix& x, const TrainConfig& cfg) {
  SplitCandidate best;
  std::vector<std::pair<double, int>> sorted;  // (value, row)
  sorted.reserve(leaf.rows.size());
  for (size_t f = 0; f < x.cols; ++f) {
    sorted.clear();
    int n_missing = 0;
    for (int r : leaf.rows) {
      const double v = x.at(static_cast<size_t>(r), f);
      if (std::isnan(v)) {
        ++n_missing;
      } else {
        sorted.emplace_back(v, r);
      }
    }
    if (sorted.size() < 2) continue;
    std::sort(sorted.begin(), sorted.end());
    double g_total = 0, h_total = 0;
    for (const auto& [v, r] : sorted) {
      g_total += gradients[static_cast<size_t>(r)];
      h_total += hessians[static_cast<size_t>(r)];
    }
    const double parent_term = gain_term(g_total, h_total, cfg.l2_leaf_reg);
    double g_left = 0, h_left = 0;
    for (size_t i = 0; i + 1 < sorted.size(); ++i) {
      g_left += gradients[static_cast<size_t>(sorted[i].second)];
      h_left += hessians[static_cast<size_t>(sorted[i].second)];
      if (sorted[i].first == sorted[i + 1].first) continue;
      const int n_left = static_cast<int>(i) + 1;
      const int n_right = static_cast<int>(sorted.size()) - n_left;
      const bool missing_goes_left = h_left >= h_total - h_left;
      const int final_left = n_left + (missing_goes_left ? n_missing : 0);
      const int final_right = n_right + (missing_goes_left ? 0 : n_missing);
      if (final_left < cfg.min_samples_per_leaf || final_right < cfg.min_samples_per_leaf) {
        continue;
      }
      const double gain = 0.5 * (gain_term(g_left, h_left, cfg.l2_leaf_reg) +
                                 gain_term(g_total - g_left, h_total - h_left, cfg.l2_leaf_reg) -
                                 parent_term);
      // strict > keeps the first candidate on ties; the scan order over
      // (feature asc, threshold asc) realizes the documented tie rule
      if (gain > best.gain) {
        best.valid = true;
        best.gain = gain;
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
        best.missing_left = missing_goes_left;
      }
    }
  }
  return best;
}

}  // namespace

Tree fit_tree(std::span<const double> gradients, std::span<const double> hessians,
              const DataMatrix& x, const TrainConfig& config) {
  config.validate();
  if (gradients.size() != x.rows || hessians.size() != x.rows) {
    throw DataError("fit_tree: gradient/hessian/feature row mismatch");
  }
  if (x.rows == 0) throw DataError("fit_tree: no rows");

  Tree tree;
  std::vector<LeafState> leaves;

  auto make_leaf = [&](std::vector<int> rows) {
    LeafState leaf;
    leaf.id = static_cast<int>(leaves.size());
    leaf.rows = std::move(rows);
    for (int r : leaf.rows) {
      leaf.grad_sum += gradients[static_cast<size_t>(r)];
      leaf.hess_sum += hessians[static_cast<size_t>(r)];
    }
    leaf.node = tree.add_leaf(leaf_weight(leaf.grad_sum, leaf.hess_sum, config.l2_leaf_reg),
                              static_cast<double>(leaf.rows.size()));
    leaf.split = find_best_split(leaf, gradients, hessians, x, config);
    const int id = leaf.id;
    leaves.push_back(std::move(leaf));
    return id;
  };

  std::vector<int> all_rows(x.rows);
  for (size_t r = 0; r < x.rows; ++r) all_rows[r] = static_cast<int>(r);
  make_leaf(std::move(all_rows));

  int num_leaves = 1;
  while (num_leaves < config.max_leaves) {
    // best-first: highest gain, ties to the earliest-created leaf
    int chosen = -1;
    for (size_t i = 0; i < leaves.size(); ++i) {
      if (!leaves[i].split.valid || leaves[i].node < 0) continue;
      if (chosen < 0 || leaves[i].split.gain > leaves[static_cast<size_t>(chosen)].split.gain) {
        chosen = static_cast<int>(i);
      }
    }
    if (chosen < 0) break;
    LeafState expanding = std::move(leaves[static_cast<size_t>(chosen)]);
    leaves[static_cast<size_t>(chosen)].node = -1;  // consumed
    leaves[static_cast<size_t>(chosen)].split.valid = false;

    const SplitCandidate& s = expanding.split;
    std::vector<int> left_rows, right_rows;
    for (int r : expanding.rows) {
      const double v = x.at(static_cast<size_t>(r), static_cast<size_t>(s.feature));
      const bool go_left = std::isnan(v) ? s.missing_left : v < s.threshold;
      (go_left ? left_rows : right_rows).push_back(r);
    }

    const int node = expanding.node;
    tree.feature[static_cast<size_t>(node)] = s.feature;
    tree.threshold[static_cast<size_t>(node)] = s.threshold;
    tree.missing_left[static_cast<size_t>(node)] = s.missing_left ? 1 : 0;
    tree.value[static_cast<size_t>(node)] = 0.0;
    const int left_id = make_leaf(std::move(left_rows));
    const int right_id = make_leaf(std::move(right_rows));
    tree.left[static_cast<size_t>(node)] = leaves[static_cast<size_t>(left_id)].node;
    tree.right[static_cast<size_t>(node)] = leaves[static_cast<size_t>(right_id)].node;
    ++num_leaves;
  }
  return tree;
}

Ensemble train_regression(const DataMatrix& x, std::span<const double> targets,
                          const TrainConfig& config,
                          std::vector<std::string> feature_names) {
  config.validate();
  if (x.rows == 0 || targets.size() != x.rows) {
    throw DataError("train_regression: need at least one row with matching targets");
  }
  for (double y : targets) {
    if (std::isnan(y)) throw DataError("train_regression: NaN target");
  }

  Ensemble model;
  model.objective = Objective::kRegression;
  model.learning_rate = config.learning_rate;
  model.config = config;
  model.feature_names = std::move(feature_names);

  double mean = 0;
  for (double y : targets) mean += y;
  mean /= static_cast<double>(targets.size());
  model.base_score = mean;

  std::vector<double> pred(x.rows, mean);
  std::vector<double> grad(x.rows), hess(x.rows, 1.0);
  for (int round = 0; round < config.num_trees; ++round) {
    for (size_t r = 0; r < x.rows; ++r) grad[r] = pred[r] - targets[r];
    Tree tree = fit_tree(grad, hess, x, config);
    for (size_t r = 0; r < x.rows; ++r) {
      pred[r] += config.learning_rate * tree.predict(x.row(r));
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

namespace {

double log2_discount(int position) { return 1.0 / std::log2(position + 2.0); }

}  // namespace

void compute_lambdas(std::span<const int> grades, std::span<const double> scores,
                     const TrainConfig& config, std::span<double> gradients,
                     std::span<double> hessians) {
  const size_t n = grades.size();
  if (scores.size() != n || gradients.size() != n || hessians.size() != n) {
    throw DataError("compute_lambdas: size mismatch");
  }
  std::fill(gradients.begin(), gradients.end(), 0.0);
  std::fill(hessians.begin(), hessians.end(), 0.0);
  if (n < 2) return;

  // current predicted order: score desc, index asc on ties
  std::vector<int> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[static_cast<size_t>(a)] != scores[static_cast<size_t>(b)]) {
      return scores[static_cast<size_t>(a)] > scores[static_cast<size_t>(b)];
    }
    return a < b;
  });
  std::vector<int> position(n);
  for (size_t p = 0; p < n; ++p) position[static_cast<size_t>(order[p])] = static_cast<int>(p);

  const int k = config.ndcg_truncation;
  std::vector<int> ideal(grades.begin(), grades.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());
  double idcg = 0;
  for (size_t p = 0; p < n && p < static_cast<size_t>(k); ++p) {
    idcg += (std::pow(2.0, ideal[p]) - 1.0) * log2_discount(static_cast<int>(p));
  }
  if (idcg <= 0) return;  // all grades equal zero: no ordered pairs below anyway

  auto discount_at = [&](int pos) { return pos < k ? log2_discount(pos) : 0.0; };

  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (grades[i] <= grades[j]) continue;  // i is the higher-graded item
      const double delta_disc =
          std::abs(discount_at(position[i]) - discount_at(position[j]));
      if (delta_disc == 0.0) continue;  // both beyond the truncation depth
      const double delta_gain = std::pow(2.0, grades[i]) - std::pow(2.0, grades[j]);
      const double delta_ndcg = delta_gain * delta_disc / idcg;
      const double rho = 1.0 / (1.0 + std::exp(config.sigma * (scores[i] - scores[j])));
      const double lambda = -config.sigma * rho * delta_ndcg;
      const double weight = config.sigma * config.sigma * rho * (1.0 - rho) * delta_ndcg;
      gradients[i] += lambda;
      gradients[j] -= lambda;
      hessians[i] += weight;
      hessians[j] += weight;
    }
  }
}

Ensemble train_lambdarank(const std::vector<QueryGroup>& groups,
                          const TrainConfig& config,
                          std::vector<std::string> feature_names) {
  config.validate();
  size_t total_rows = 0;
  size_t cols = 0;
  bool has_signal = false;
  for (const auto& g : groups) {
    if (g.rows.size() != g.grades.size()) {
      throw DataError("train_lambdarank: rows/grades mismatch in group " + g.query_id);
    }
    if (!g.rows.empty()) cols = g.rows[0].size();
    total_rows += g.rows.size();
    if (g.rows.size() >= 2) {
      for (size_t i = 1; i < g.grades.size(); ++i) {
        if (g.grades[i] != g.grades[0]) has_signal = true;
      }
    }
  }
  if (total_rows == 0) throw DataError("train_lambdarank: no rows");
  if (!has_signal) throw DataError("no ranking signal: every group has uniform grades");

  DataMatrix x(total_rows, cols);
  std::vector<std::pair<size_t, size_t>> bounds;  // [begin, end) per group
  size_t at = 0;
  for (const auto& g : groups) {
    const size_t begin = at;
    for (const auto& row : g.rows) {
      if (row.size() != cols) {
        throw DataError("train_lambdarank: inconsistent feature width in group " + g.query_id);
      }
      for (size_t c = 0; c < cols; ++c) x.at(at, c) = row[c];
      ++at;
    }
    bounds.emplace_back(begin, at);
  }

  Ensemble model;
  model.objective = Objective::kLambdaRank;
  model.base_score = 0.0;
  model.learning_rate = config.learning_rate;
  model.config = config;
  model.feature_names = std::move(feature_names);

  std::vector<double> scores(total_rows, 0.0);
  std::vector<double> grad(total_rows), hess(total_rows);
  for (int round = 0; round < config.num_trees; ++round) {
    for (size_t gi = 0; gi < groups.size(); ++gi) {
      const auto [begin, end] = bounds[gi];
      compute_lambdas(groups[gi].grades,
                      std::span<const double>(scores).subspan(begin, end - begin), config,
                      std::span<double>(grad).subspan(begin, end - begin),
                      std::span<double>(hess).subspan(begin, end - begin));
    }
    Tree tree = fit_tree(grad, hess, x, config);
    for (size_t r = 0; r < total_rows; ++r) {
      scores[r] += config.learning_rate * tree.predict(x.row(r));
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace xfer::gbt
