#ifndef XFER_STATS_HPP_
#define XFER_STATS_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xfer/score_matrix.hpp"

namespace xfer::stats {

struct SummaryRow {
  std::string task;
  std::optional<double> mono_mean;
  std::optional<double> cross_mean;
  std::optional<double> overall_mean;   // mono and cross cells together
  std::optional<double> zero_shot_mean;
};

SummaryRow summary_scores(const ScoreMatrix& matrix);

// 1-based descending ranks with tied scores sharing the average of their
// positional ranks. Input and output are aligned.
std::vector<double> ranks_descending(std::span<const double> scores);

// Arithmetic mean of an item's per-task ranks.
double mean_rank(std::span<const double> task_ranks);

struct TargetRankRow {
  std::string target;
  std::vector<std::optional<double>> cross_means;  // aligned with tasks
  std::vector<std::optional<double>> zero_shots;
  double mean_rank = 0.0;
};

struct TargetRankTable {
  std::vector<std::string> tasks;
  std::vector<TargetRankRow> rows;            // sorted ascending by mean rank
  std::vector<std::string> excluded_targets;  // absent from some task
};

// Per-task mean of each target's row (monolingual and zero-shot cells
// excluded), ranked within each task, sorted by mean rank.
TargetRankTable rank_targets(const std::vector<ScoreMatrix>& matrices,
                             const std::vector<std::string>& target_subset);

enum class TargetFilter { kAll, kLowResourceOnly };

struct SourceRankRow {
  std::string source;
  std::vector<std::optional<double>> scores;  // per-task mean over targets
  std::vector<std::optional<double>> ranks;
  double mean_rank = 0.0;
};

struct SourceRankTable {
  std::vector<std::string> tasks;
  std::vector<SourceRankRow> rows;  // sorted ascending by mean rank
};

// Per-task column means over included targets (mono cells excluded);
// low-resource-only keeps targets absent from the task's source set.
SourceRankTable rank_sources(const std::vector<ScoreMatrix>& matrices,
                             const std::vector<std::string>& source_subset,
                             TargetFilter filter);

struct BestSourceRow {
  std::string target;
  std::string source;
  double score = 0.0;
  bool tied = false;  // lexicographic winner of a score tie
};

std::vector<BestSourceRow> best_source_per_target(const ScoreMatrix& matrix);

enum class Axis { kRows, kColumns };

// Binary merge tree over leaves 0..n-1; merge k creates node n+k.
struct Dendrogram {
  struct Merge {
    int a = -1;
    int b = -1;
    double height = 0.0;
  };
  std::vector<std::string> leaf_labels;
  std::vector<Merge> merges;

  // Left-subtree-first traversal; children ordered by smaller merge
  // height first, then by lexicographically smallest contained leaf.
  std::vector<int> leaf_order() const;
  // Nested-parenthesis rendering with merge heights.
  std::string to_string() const;
};

// Agglomerative average linkage on Euclidean distance between the axis's
// performance vectors; missing cells are mean-imputed per vector before
// distances are taken. Requires at least two vectors.
Dendrogram hierarchical_cluster(const ScoreMatrix& matrix, Axis axis);

// Standalone SVG of the matrix reordered by row/column dendrograms, cells
// on a linear two-color ramp, zero-shot column leftmost.
std::string render_heatmap_svg(const ScoreMatrix& matrix);

}  // namespace xfer::stats

#endif  // XFER_STATS_HPP_
