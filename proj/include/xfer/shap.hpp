#ifndef XFER_SHAP_HPP_
#define XFER_SHAP_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "xfer/boosting.hpp"

namespace xfer::shap {

struct Attribution {
  double base_value = 0.0;
  std::vector<double> contributions;
  double prediction = 0.0;
};

// Exact Shapley values for the tree-path-conditional game: features not in
// the coalition are marginalized by cover-weighted descent. Polynomial in
// the tree size (Lundberg's path algorithm), summed across trees.
Attribution tree_shap(const gbt::Ensemble& model, std::span<const double> row);

// Classical subset enumeration over the same game. Exponential; refuses
// models with more than 12 features. Kept as the independent oracle for
// tree_shap and exposed for small models.
Attribution brute_force_shap(const gbt::Ensemble& model, std::span<const double> row);

struct ImportanceRow {
  std::string feature;
  double importance = 0.0;  // mean |contribution| over the pair set
  double normalized = 0.0;  // importance / max importance
  bool available = true;    // false when the feature is missing on every row
};

struct ImportanceTable {
  std::string task;
  std::vector<ImportanceRow> rows;  // feature order of the model
  bool all_zero = false;
};

ImportanceTable aggregate_importance(const gbt::Ensemble& model,
                                     const std::vector<std::vector<double>>& pair_rows,
                                     const std::string& task);

// shapimp.v1 table: task,feature,importance,normalized,available.
void save_importance(const ImportanceTable& table, const std::filesystem::path& path);
std::string format_importance(const ImportanceTable& table);

}  // namespace xfer::shap

#endif  // XFER_SHAP_HPP_
