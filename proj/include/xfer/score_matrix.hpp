#ifndef XFER_SCORE_MATRIX_HPP_
#define XFER_SCORE_MATRIX_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xfer {

// Reserved pseudo-source for zero-shot rows in scores.v1.
inline constexpr std::string_view kZeroShotId = "__zero_shot__";

// One task's transfer-score grid. Cells are partial; the zero-shot
// column is stored apart from the real sources and the diagonal is the
// monolingual band.
struct ScoreMatrix {
  std::string task;
  std::vector<std::string> sources;  // sorted, excludes the zero-shot pseudo-source
  std::vector<std::string> targets;  // sorted
  std::map<std::pair<std::string, std::string>, double> cells;  // (source, target)
  std::map<std::string, double> zero_shot;  // target -> score

  bool has(const std::string& source, const std::string& target) const {
    return cells.count({source, target}) > 0;
  }
  std::optional<double> at(const std::string& source, const std::string& target) const;
  void insert(const std::string& source, const std::string& target, double score);
};

// scores.v1: optional "# scores.v1" line, header task,source,target,score,
// one row per cell; scores must lie in [0, 1].
std::map<std::string, ScoreMatrix> load_score_matrices(const std::filesystem::path& path);
void save_score_matrices(const std::map<std::string, ScoreMatrix>& matrices,
                         const std::filesystem::path& path);

}  // namespace xfer

#endif  // XFER_SCORE_MATRIX_HPP_
