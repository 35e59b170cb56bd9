#include "xfer/score_matrix.hpp"

#include <algorithm>
#include <fstream>

#include "xfer/common.hpp"

namespace xfer {

std::optional<double> ScoreMatrix::at(const std::string& source,
                                      const std::string& target) const {
  auto it = cells.find({source, target});
  if (it == cells.end()) return std::nullopt;
  return it->second;
}

void ScoreMatrix::insert(const std::string& source, const std::string& target,
                         double score) {
  if (source == kZeroShotId) {
    if (zero_shot.count(target)) {
      throw DataError("scores: duplicate zero-shot cell for target " + target);
    }
    zero_shot[target] = score;
  } else {
    if (!cells.emplace(std::make_pair(source, target), score).second) {
      throw DataError("scores: duplicate cell (" + source + ", " + target + ")");
    }
    if (!std::binary_search(sources.begin(), sources.end(), source)) {
      sources.insert(std::upper_bound(sources.begin(), sources.end(), source), source);
    }
  }
  if (!std::binary_search(targets.begin(), targets.end(), target)) {
    targets.insert(std::upper_bound(targets.begin(), targets.end(), target), target);
  }
}

std::map<std::string, ScoreMatrix> load_score_matrices(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scores: " + path.string());
  std::map<std::string, ScoreMatrix> out;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto tag = trim(std::string_view(line).substr(1));
      if (!tag.empty() && tag != "scores.v1") {
        throw DataError("scores: format mismatch, got '" + std::string(tag) + "'");
      }
      continue;
    }
    auto fields = split(line, ',');
    if (!header_seen) {
      if (fields.size() != 4 || fields[0] != "task" || fields[1] != "source" ||
          fields[2] != "target" || fields[3] != "score") {
        throw DataError("scores.v1: expected header task,source,target,score");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) throw DataError("scores.v1: malformed row: " + line);
    const std::string task(trim(fields[0]));
    const std::string source(trim(fields[1]));
    const std::string target(trim(fields[2]));
    const double score = parse_double(fields[3]);
    if (score < 0.0 || score > 1.0) {
      throw DataError("scores.v1: score outside [0,1] in row: " + line);
    }
    auto& matrix = out[task];
    matrix.task = task;
    matrix.insert(source, target, score);
  }
  if (!header_seen) throw DataError("scores.v1: missing header: " + path.string());
  if (out.empty()) throw DataError("scores.v1: no rows: " + path.string());
  return out;
}

void save_score_matrices(const std::map<std::string, ScoreMatrix>& matrices,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write scores: " + path.string());
  out << "# scores.v1\n";
  out << "task,source,target,score\n";
  for (const auto& [task, matrix] : matrices) {
    for (const auto& [key, score] : matrix.cells) {
      out << task << "," << key.first << "," << key.second << ","
          << format_double(score) << "\n";
    }
    for (const auto& [target, score] : matrix.zero_shot) {
      out << task << "," << kZeroShotId << "," << target << ","
          << format_double(score) << "\n";
    }
  }
}

}  // namespace xfer
