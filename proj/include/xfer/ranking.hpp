#ifndef XFER_RANKING_HPP_
#define XFER_RANKING_HPP_

#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "xfer/boosting.hpp"
#include "xfer/features.hpp"
#include "xfer/score_matrix.hpp"

namespace xfer::rank {

// Rank-based quantile grading of raw scores within one query: 1-based
// descending positions, grade = floor(num_grades * (n - pos) / n) clipped
// to [0, num_grades-1]; tied scores share their average position.
std::vector<int> grade_scores(std::span<const double> raw, int num_grades = 5);

struct NdcgResult {
  double value = 1.0;
  bool degenerate = false;  // IDCG was 0; value pinned to 1 by convention
};

// order[p] is the item shown at rank p (0-based). Gains are 2^grade - 1,
// discount 1/log2(p+2), ideal DCG from grades sorted descending.
NdcgResult ndcg_at_k(std::span<const int> order, std::span<const int> grades, int k);

// Sources sorted by predicted score descending, ties broken by source id,
// truncated to k.
std::vector<std::pair<std::string, double>> rank_sources(
    const gbt::Ensemble& model, const std::string& target,
    const std::vector<feat::PairFeatureVector>& candidates, int k);

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

// Undirected influence graph with version contraction via aliases
// (plhist.v1: "edge a b", "alias a canonical", "#" comments).
struct HistoryGraph {
  std::set<std::string> nodes;
  std::map<std::string, std::set<std::string>> adjacency;
  std::map<std::string, std::string> aliases;

  std::string canonical(const std::string& id) const;
  void add_edge(const std::string& a, const std::string& b);
  void add_alias(const std::string& from, const std::string& to);
  std::map<std::string, int> bfs_distances(const std::string& target) const;
};

HistoryGraph load_history_graph(const std::filesystem::path& path);

struct HistoryRanking {
  std::vector<std::pair<std::string, int>> entries;  // (source, distance)
  bool target_in_graph = true;
};

// Shortest-path ordering: distance ascending, unreachable last, ties by
// source id. A target absent from the graph leaves every candidate
// unreachable (deterministic lexicographic order, flagged).
HistoryRanking history_rank(const HistoryGraph& graph, const std::string& target,
                            const std::vector<std::string>& candidates, int k);

enum class RankMethod { kRanker, kRegression, kHistory };
std::string_view method_name(RankMethod m);
std::optional<RankMethod> method_from_name(std::string_view name);

struct EvalConfig {
  RankMethod method = RankMethod::kRanker;
  int k = 3;
  int num_grades = 5;
  bool include_mono = false;
  gbt::TrainConfig train;
  const HistoryGraph* history = nullptr;  // required for kHistory
};

struct FoldResult {
  std::string target;
  double ndcg = 0.0;
  bool degenerate = false;
};

struct EvalReport {
  RankMethod method = RankMethod::kRanker;
  int k = 3;
  std::vector<FoldResult> folds;     // sorted by target id
  std::vector<std::string> skipped;  // targets with < 2 candidates
  double mean = 0.0;
  double stddev = 0.0;  // population

  void finalize();  // recomputes mean/stddev from folds
};

// Query groups over a score matrix: one group per target, candidate
// sources joined with their pair features, zero-shot always excluded and
// the monolingual diagonal excluded unless include_mono.
std::vector<gbt::QueryGroup> build_query_groups(const ScoreMatrix& matrix,
                                                const feat::PairFeatureMap& pairs,
                                                bool include_mono, int num_grades,
                                                const std::string& exclude_target = "");

// Leave-one-out cross-validation over targets, per the method.
EvalReport loo_cv(const ScoreMatrix& matrix, const feat::PairFeatureMap& pairs,
                  const EvalConfig& config);

// Report table "method,target,ndcg,degenerate" plus a summary line.
void save_report(const EvalReport& report, const std::filesystem::path& path);
std::string format_report(const EvalReport& report);

}  // namespace xfer::rank

#endif  // XFER_RANKING_HPP_
