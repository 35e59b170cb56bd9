#include "xfer/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "xfer/common.hpp"

namespace xfer::shap {

namespace {

void check_cover(const gbt::Ensemble& model) {
  for (const gbt::Tree& tree : model.trees) {
    if (tree.cover.empty() || tree.cover[0] <= 0) {
      throw DataError("model lacks cover metadata");
    }
  }
}

size_t expect_width(const gbt::Ensemble& model, std::span<const double> row) {
  size_t width = row.size();
  if (!model.feature_names.empty() && width != model.feature_names.size()) {
    throw DataError("shap: row width does not match model feature names");
  }
  for (const gbt::Tree& tree : model.trees) {
    for (int f : tree.feature) {
      if (f >= 0 && static_cast<size_t>(f) >= width) {
        throw DataError("shap: row narrower than model features");
      }
    }
  }
  return width;
}

// --- path algorithm -------------------------------------------------------

struct PathElement {
  int feature_index = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double pweight = 0.0;
};

void extend_path(PathElement* path, int depth, double zero_fraction,
                 double one_fraction, int feature_index) {
  path[depth] = PathElement{feature_index, zero_fraction, one_fraction,
                            depth == 0 ? 1.0 : 0.0};
  for (int i = depth - 1; i >= 0; --i) {
    path[i + 1].pweight += one_fraction * path[i].pweight * (i + 1) /
                           static_cast<double>(depth + 1);
    path[i].pweight = zero_fraction * path[i].pweight * (depth - i) /
                      static_cast<double>(depth + 1);
  }
}

void unwind_path(PathElement* path, int depth, int index) {
  const double one_fraction = path[index].one_fraction;
  const double zero_fraction = path[index].zero_fraction;
  double next_one = path[depth].pweight;
  for (int i = depth - 1; i >= 0; --i) {
    if (one_fraction != 0) {
      const double tmp = path[i].pweight;
      path[i].pweight = next_one * (depth + 1) /
                        (static_cast<double>(i + 1) * one_fraction);
      next_one = tmp - path[i].pweight * zero_fraction * (depth - i) /
                           static_cast<double>(depth + 1);
    } else {
      path[i].pweight = path[i].pweight * (depth + 1) /
                        (zero_fraction * (depth - i));
    }
  }
  for (int i = index; i < depth; ++i) {
    path[i].feature_index = path[i + 1].feature_index;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

double unwound_path_sum(const PathElement* path, int depth, int index) {
  const double one_fraction = path[index].one_fraction;
  const double zero_fraction = path[index].zero_fraction;
  double next_one = path[depth].pweight;
  double total = 0;
  for (int i = depth - 1; i >= 0; --i) {
    if (one_fraction != 0) {
      const double tmp = next_one * (depth + 1) /
                         (static_cast<double>(i + 1) * one_fraction);
      total += tmp;
      next_one = path[i].pweight - tmp * zero_fraction * (depth - i) /
                                       static_cast<double>(depth + 1);
    } else {
      total += path[i].pweight * (depth + 1) /
               (zero_fraction * (depth - i));
    }
  }
  return total;
}

void shap_recurse(const gbt::Tree& tree, std::span<const double> row,
                  std::span<double> phi, int node, int depth,
                  PathElement* parent_path, double parent_zero,
                  double parent_one, int parent_feature) {
  PathElement* path = parent_path + depth + 1;
  std::copy(parent_path, parent_path + depth, path);
  extend_path(path, depth, parent_zero, parent_one, parent_feature);

  if (tree.is_leaf(node)) {
    for (int i = 1; i <= depth; ++i) {
      const double w = unwound_path_sum(path, depth, i);
      phi[static_cast<size_t>(path[i].feature_index)] +=
          w * (path[i].one_fraction - path[i].zero_fraction) *
          tree.value[static_cast<size_t>(node)];
    }
    return;
  }

  const int hot = tree.route(node, row);
  const int cold = hot == tree.left[static_cast<size_t>(node)]
                       ? tree.right[static_cast<size_t>(node)]
                       : tree.left[static_cast<size_t>(node)];
  const double node_cover = tree.cover[static_cast<size_t>(node)];
  const double hot_fraction = tree.cover[static_cast<size_t>(hot)] / node_cover;
  const double cold_fraction = tree.cover[static_cast<size_t>(cold)] / node_cover;
  const int split = tree.feature[static_cast<size_t>(node)];

  double incoming_zero = 1.0;
  double incoming_one = 1.0;
  int path_index = 0;
  for (; path_index <= depth; ++path_index) {
    if (path[path_index].feature_index == split) break;
  }
  if (path_index != depth + 1) {
    incoming_zero = path[path_index].zero_fraction;
    incoming_one = path[path_index].one_fraction;
    unwind_path(path, depth, path_index);
    --depth;
  }

  shap_recurse(tree, row, phi, hot, depth + 1, path,
               hot_fraction * incoming_zero, incoming_one, split);
  shap_recurse(tree, row, phi, cold, depth + 1, path,
               cold_fraction * incoming_zero, 0.0, split);
}

void tree_shap_single(const gbt::Tree& tree, std::span<const double> row,
                      std::span<double> phi) {
  const int max_depth = tree.max_depth() + 2;
  std::vector<PathElement> storage(static_cast<size_t>((max_depth + 1) * (max_depth + 2)) / 2 +
                                   static_cast<size_t>(max_depth) + 2);
  shap_recurse(tree, row, phi, 0, 0, storage.data(), 1.0, 1.0, -1);
}

// --- brute force ----------------------------------------------------------

// Conditional expectation of one tree given the coalition mask: in-mask
// features follow the row, the rest split by training cover.
double descend(const gbt::Tree& tree, int node, std::span<const double> row,
               std::uint32_t mask) {
  if (tree.is_leaf(node)) return tree.value[static_cast<size_t>(node)];
  const int split = tree.feature[static_cast<size_t>(node)];
  if (mask & (1u << split)) {
    return descend(tree, tree.route(node, row), row, mask);
  }
  const double cover = tree.cover[static_cast<size_t>(node)];
  const double wl = tree.cover[static_cast<size_t>(tree.left[static_cast<size_t>(node)])];
  const double wr = tree.cover[static_cast<size_t>(tree.right[static_cast<size_t>(node)])];
  return (wl * descend(tree, tree.left[static_cast<size_t>(node)], row, mask) +
          wr * descend(tree, tree.right[static_cast<size_t>(node)], row, mask)) /
         cover;
}

}  // namespace

Attribution tree_shap(const gbt::Ensemble& model, std::span<const double> row) {
  check_cover(model);
  const size_t width = expect_width(model, row);
  Attribution out;
  out.contributions.assign(width, 0.0);
  out.base_value = model.base_score;
  std::vector<double> phi(width, 0.0);
  for (const gbt::Tree& tree : model.trees) {
    std::fill(phi.begin(), phi.end(), 0.0);
    tree_shap_single(tree, row, phi);
    for (size_t f = 0; f < width; ++f) {
      out.contributions[f] += model.learning_rate * phi[f];
    }
    out.base_value += model.learning_rate * tree.expected_value();
  }
  out.prediction = model.predict(row);
  return out;
}

Attribution brute_force_shap(const gbt::Ensemble& model, std::span<const double> row) {
  check_cover(model);
  const size_t width = expect_width(model, row);
  if (width > 12) {
    throw DataError("brute_force_shap: limited to 12 features (2^n subsets)");
  }
  const std::uint32_t full = (1u << width) - 1;

  // v(mask) over all coalitions
  std::vector<double> value(full + 1, 0.0);
  for (std::uint32_t mask = 0; mask <= full; ++mask) {
    double v = model.base_score;
    for (const gbt::Tree& tree : model.trees) {
      v += model.learning_rate * descend(tree, 0, row, mask);
    }
    value[mask] = v;
  }

  std::vector<double> factorial(width + 1, 1.0);
  for (size_t i = 1; i <= width; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);

  Attribution out;
  out.contributions.assign(width, 0.0);
  out.base_value = value[0];
  out.prediction = value[full];
  for (size_t f = 0; f < width; ++f) {
    const std::uint32_t bit = 1u << f;
    double phi = 0;
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      if (mask & bit) continue;
      const int s = std::popcount(mask);
      const double weight = factorial[static_cast<size_t>(s)] *
                            factorial[width - static_cast<size_t>(s) - 1] /
                            factorial[width];
      phi += weight * (value[mask | bit] - value[mask]);
    }
    out.contributions[f] = phi;
  }
  return out;
}

ImportanceTable aggregate_importance(const gbt::Ensemble& model,
                                     const std::vector<std::vector<double>>& pair_rows,
                                     const std::string& task) {
  if (pair_rows.empty()) throw DataError("aggregate_importance: empty pair set");
  const size_t width = pair_rows.front().size();
  std::vector<double> sums(width, 0.0);
  std::vector<bool> seen(width, false);
  for (const auto& row : pair_rows) {
    if (row.size() != width) throw DataError("aggregate_importance: ragged pair set");
    Attribution attr = tree_shap(model, row);
    for (size_t f = 0; f < width; ++f) {
      sums[f] += std::abs(attr.contributions[f]);
      if (!std::isnan(row[f])) seen[f] = true;
    }
  }

  ImportanceTable table;
  table.task = task;
  double max_importance = 0;
  for (size_t f = 0; f < width; ++f) {
    ImportanceRow row;
    row.feature = f < model.feature_names.size() ? model.feature_names[f]
                                                 : "f" + std::to_string(f);
    row.importance = sums[f] / static_cast<double>(pair_rows.size());
    row.available = seen[f];
    max_importance = std::max(max_importance, row.importance);
    table.rows.push_back(std::move(row));
  }
  table.all_zero = max_importance == 0;
  for (auto& row : table.rows) {
    row.normalized = table.all_zero ? 0.0 : row.importance / max_importance;
  }
  return table;
}

std::string format_importance(const ImportanceTable& table) {
  std::ostringstream out;
  out << "# shapimp.v1\n";
  out << "task,feature,importance,normalized,available\n";
  for (const auto& row : table.rows) {
    out << table.task << "," << row.feature << "," << format_double(row.importance)
        << "," << format_double(row.normalized) << "," << (row.available ? "1" : "0")
        << "\n";
  }
  if (table.all_zero) out << "# all importances are zero\n";
  return out.str();
}

void save_importance(const ImportanceTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write importance table: " + path.string());
  out << format_importance(table);
}

}  // namespace xfer::shap
