#include "xfer/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include "xfer/common.hpp"

namespace xfer::rank {

std::vector<int> grade_scores(std::span<const double> raw, int num_grades) {
  if (num_grades < 2) throw DataError("grade_scores: num_grades must be >= 2");
  const size_t n = raw.size();
  std::vector<int> grades(n, 0);
  if (n == 0) return grades;

  std::vector<int> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (raw[static_cast<size_t>(a)] != raw[static_cast<size_t>(b)]) {
      return raw[static_cast<size_t>(a)] > raw[static_cast<size_t>(b)];
    }
    return a < b;
  });

  // average 1-based position over each tie run
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n &&
           raw[static_cast<size_t>(order[j + 1])] == raw[static_cast<size_t>(order[i])]) {
      ++j;
    }
    const double avg_pos = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    const double scaled = static_cast<double>(num_grades) *
                          (static_cast<double>(n) - avg_pos) / static_cast<double>(n);
    int grade = static_cast<int>(std::floor(scaled));
    grade = std::clamp(grade, 0, num_grades - 1);
    for (size_t p = i; p <= j; ++p) grades[static_cast<size_t>(order[p])] = grade;
    i = j + 1;
  }
  return grades;
}

NdcgResult ndcg_at_k(std::span<const int> order, std::span<const int> grades, int k) {
  if (k < 1) throw DataError("ndcg_at_k: k must be >= 1");
  if (order.size() != grades.size()) throw DataError("ndcg_at_k: order/grades mismatch");
  const size_t n = grades.size();
  const size_t depth = std::min<size_t>(n, static_cast<size_t>(k));

  std::vector<int> ideal(grades.begin(), grades.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());

  double dcg = 0, idcg = 0;
  for (size_t p = 0; p < depth; ++p) {
    const double disc = 1.0 / std::log2(static_cast<double>(p) + 2.0);
    dcg += (std::pow(2.0, grades[static_cast<size_t>(order[p])]) - 1.0) * disc;
    idcg += (std::pow(2.0, ideal[p]) - 1.0) * disc;
  }
  if (idcg == 0.0) return NdcgResult{1.0, true};
  return NdcgResult{dcg / idcg, false};
}

std::vector<std::pair<std::string, double>> rank_sources(
    const gbt::Ensemble& model, const std::string& target,
    const std::vector<feat::PairFeatureVector>& candidates, int k) {
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(candidates.size());
  for (const auto& pair : candidates) {
    if (pair.target != target) {
      throw DataError("rank_sources: candidate (" + pair.source + ", " + pair.target +
                      ") does not match target " + target);
    }
    scored.emplace_back(pair.source, model.predict(pair.dense()));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (k >= 0 && scored.size() > static_cast<size_t>(k)) scored.resize(static_cast<size_t>(k));
  return scored;
}

std::string HistoryGraph::canonical(const std::string& id) const {
  std::string cur = id;
  for (int hops = 0; hops < 32; ++hops) {
    auto it = aliases.find(cur);
    if (it == aliases.end()) return cur;
    cur = it->second;
  }
  throw DataError("history graph: alias cycle at " + id);
}

void HistoryGraph::add_edge(const std::string& a, const std::string& b) {
  const std::string ca = canonical(a);
  const std::string cb = canonical(b);
  nodes.insert(ca);
  nodes.insert(cb);
  if (ca == cb) return;  // version contraction can collapse an edge
  adjacency[ca].insert(cb);
  adjacency[cb].insert(ca);
}

void HistoryGraph::add_alias(const std::string& from, const std::string& to) {
  aliases[from] = to;
  canonical(from);  // cycle check
}

std::map<std::string, int> HistoryGraph::bfs_distances(const std::string& target) const {
  std::map<std::string, int> dist;
  const std::string start = canonical(target);
  if (!nodes.count(start)) return dist;
  std::deque<std::string> queue = {start};
  dist[start] = 0;
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    auto it = adjacency.find(cur);
    if (it == adjacency.end()) continue;
    for (const std::string& next : it->second) {
      if (!dist.count(next)) {
        dist[next] = dist[cur] + 1;
        queue.push_back(next);
      }
    }
  }
  return dist;
}

HistoryGraph load_history_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open history graph: " + path.string());
  HistoryGraph graph;
  std::string line;
  // aliases must be applied before edges regardless of file order; collect
  // first, then contract
  std::vector<std::pair<std::string, std::string>> edges;
  while (std::getline(in, line)) {
    auto stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::istringstream row{std::string(stripped)};
    std::string kind, a, b;
    row >> kind >> a >> b;
    if (kind == "edge" && !a.empty() && !b.empty()) {
      edges.emplace_back(a, b);
    } else if (kind == "alias" && !a.empty() && !b.empty()) {
      graph.add_alias(a, b);
    } else {
      throw DataError("plhist.v1: malformed line: " + line);
    }
  }
  for (const auto& [a, b] : edges) graph.add_edge(a, b);
  return graph;
}

HistoryRanking history_rank(const HistoryGraph& graph, const std::string& target,
                            const std::vector<std::string>& candidates, int k) {
  HistoryRanking out;
  const std::string canon_target = graph.canonical(target);
  out.target_in_graph = graph.nodes.count(canon_target) > 0;
  const auto dist = graph.bfs_distances(canon_target);
  for (const std::string& candidate : candidates) {
    auto it = dist.find(graph.canonical(candidate));
    out.entries.emplace_back(candidate, it == dist.end() ? kUnreachable : it->second);
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  if (k >= 0 && out.entries.size() > static_cast<size_t>(k)) {
    out.entries.resize(static_cast<size_t>(k));
  }
  return out;
}

std::string_view method_name(RankMethod m) {
  switch (m) {
    case RankMethod::kRanker: return "ranker";
    case RankMethod::kRegression: return "regression";
    case RankMethod::kHistory: return "history";
  }
  return "?";
}

std::optional<RankMethod> method_from_name(std::string_view name) {
  if (name == "ranker") return RankMethod::kRanker;
  if (name == "regression") return RankMethod::kRegression;
  if (name == "history") return RankMethod::kHistory;
  return std::nullopt;
}

void EvalReport::finalize() {
  std::sort(folds.begin(), folds.end(),
            [](const FoldResult& a, const FoldResult& b) { return a.target < b.target; });
  mean = 0;
  for (const auto& f : folds) mean += f.ndcg;
  if (!folds.empty()) mean /= static_cast<double>(folds.size());
  double var = 0;
  for (const auto& f : folds) var += (f.ndcg - mean) * (f.ndcg - mean);
  if (!folds.empty()) var /= static_cast<double>(folds.size());
  stddev = std::sqrt(var);
}

std::vector<gbt::QueryGroup> build_query_groups(const ScoreMatrix& matrix,
                                                const feat::PairFeatureMap& pairs,
                                                bool include_mono, int num_grades,
                                                const std::string& exclude_target) {
  std::vector<gbt::QueryGroup> groups;
  for (const std::string& target : matrix.targets) {
    if (target == exclude_target) continue;
    gbt::QueryGroup group;
    group.query_id = target;
    std::vector<std::string> sources;
    for (const std::string& source : matrix.sources) {
      if (!include_mono && source == target) continue;
      auto score = matrix.at(source, target);
      if (!score) continue;
      auto pf = pairs.find({source, target});
      if (pf == pairs.end()) continue;  // unscorable candidate: no feature row
      group.rows.push_back(pf->second.dense());
      group.raw_scores.push_back(*score);
      sources.push_back(source);
    }
    if (group.rows.empty()) continue;
    group.grades = grade_scores(group.raw_scores, num_grades);
    groups.push_back(std::move(group));
  }
  return groups;
}

namespace {

// Shared fold logic: candidate list for the held-out target.
struct TestQuery {
  std::vector<std::string> sources;
  std::vector<feat::PairFeatureVector> features;
  std::vector<double> raw_scores;
};

TestQuery collect_test_query(const ScoreMatrix& matrix, const feat::PairFeatureMap& pairs,
                             const std::string& target, bool include_mono,
                             RankMethod method) {
  TestQuery q;
  for (const std::string& source : matrix.sources) {
    if (!include_mono && source == target) continue;
    auto score = matrix.at(source, target);
    if (!score) continue;
    if (method != RankMethod::kHistory) {
      auto pf = pairs.find({source, target});
      if (pf == pairs.end()) continue;
      q.features.push_back(pf->second);
    }
    q.sources.push_back(source);
    q.raw_scores.push_back(*score);
  }
  return q;
}

}  // namespace

EvalReport loo_cv(const ScoreMatrix& matrix, const feat::PairFeatureMap& pairs,
                  const EvalConfig& config) {
  if (config.method == RankMethod::kHistory && config.history == nullptr) {
    throw DataError("loo_cv: history method requires a history graph");
  }
  EvalReport report;
  report.method = config.method;
  report.k = config.k;

  for (const std::string& target : matrix.targets) {
    TestQuery test = collect_test_query(matrix, pairs, target, config.include_mono,
                                        config.method);
    if (test.sources.size() < 2) {
      report.skipped.push_back(target);
      continue;
    }

    // ranking of the held-out target's candidates, per method
    std::vector<std::string> predicted;
    switch (config.method) {
      case RankMethod::kHistory: {
        HistoryRanking ranking = history_rank(*config.history, target, test.sources,
                                              static_cast<int>(test.sources.size()));
        for (const auto& [source, d] : ranking.entries) predicted.push_back(source);
        break;
      }
      case RankMethod::kRanker: {
        auto groups = build_query_groups(matrix, pairs, config.include_mono,
                                         config.num_grades, target);
        for (const auto& g : groups) {
          if (g.query_id == target) {
            throw std::logic_error("loo_cv: training fold contains the test target");
          }
        }
        gbt::Ensemble model = gbt::train_lambdarank(groups, config.train);
        auto ranked = rank_sources(model, target, test.features,
                                   static_cast<int>(test.features.size()));
        for (const auto& [source, s] : ranked) predicted.push_back(source);
        break;
      }
      case RankMethod::kRegression: {
        auto groups = build_query_groups(matrix, pairs, config.include_mono,
                                         config.num_grades, target);
        size_t rows = 0;
        for (const auto& g : groups) rows += g.rows.size();
        if (rows == 0) throw DataError("loo_cv: no training rows for fold " + target);
        const size_t cols = groups.front().rows.front().size();
        gbt::DataMatrix x(rows, cols);
        std::vector<double> y;
        y.reserve(rows);
        size_t at = 0;
        for (const auto& g : groups) {
          for (size_t i = 0; i < g.rows.size(); ++i) {
            for (size_t c = 0; c < cols; ++c) x.at(at, c) = g.rows[i][c];
            y.push_back(g.raw_scores[i]);
            ++at;
          }
        }
        gbt::Ensemble model = gbt::train_regression(x, y, config.train);
        auto ranked = rank_sources(model, target, test.features,
                                   static_cast<int>(test.features.size()));
        for (const auto& [source, s] : ranked) predicted.push_back(source);
        break;
      }
    }

    // grade the true scores and evaluate the predicted order
    std::vector<int> grades = grade_scores(test.raw_scores, config.num_grades);
    std::map<std::string, int> index;
    for (size_t i = 0; i < test.sources.size(); ++i) {
      index[test.sources[i]] = static_cast<int>(i);
    }
    std::vector<int> order;
    order.reserve(predicted.size());
    for (const std::string& source : predicted) order.push_back(index.at(source));

    NdcgResult ndcg = ndcg_at_k(order, grades, config.k);
    // uniform grades score 1 under any order; flag them like IDCG == 0
    bool uniform = true;
    for (int g : grades) uniform = uniform && g == grades.front();
    report.folds.push_back(FoldResult{target, ndcg.value, ndcg.degenerate || uniform});
  }

  report.finalize();
  return report;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  out << "# evalreport.v1\n";
  out << "method,target,ndcg,degenerate\n";
  char buf[64];
  for (const auto& fold : report.folds) {
    std::snprintf(buf, sizeof(buf), "%.6f", fold.ndcg);
    out << method_name(report.method) << "," << fold.target << "," << buf << ","
        << (fold.degenerate ? "1" : "0") << "\n";
  }
  for (const auto& target : report.skipped) {
    out << "# skipped: " << target << " (fewer than 2 candidates)\n";
  }
  std::snprintf(buf, sizeof(buf), "%.6f ± %.6f", report.mean, report.stddev);
  out << "# NDCG@" << report.k << " mean " << buf << " over " << report.folds.size()
      << " folds\n";
  return out.str();
}

void save_report(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write report: " + path.string());
  out << format_report(report);
}

}  // namespace xfer::rank
