#include "xfer/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "xfer/common.hpp"

namespace xfer::stats {

namespace {

std::optional<double> mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

}  // namespace

SummaryRow summary_scores(const ScoreMatrix& matrix) {
  if (matrix.cells.empty() && matrix.zero_shot.empty()) {
    throw DataError("summary_scores: empty matrix");
  }
  std::vector<double> mono, cross, zero;
  for (const auto& [key, score] : matrix.cells) {
    (key.first == key.second ? mono : cross).push_back(score);
  }
  for (const auto& [target, score] : matrix.zero_shot) zero.push_back(score);

  SummaryRow row;
  row.task = matrix.task;
  row.mono_mean = mean_of(mono);
  row.cross_mean = mean_of(cross);
  std::vector<double> overall = mono;
  overall.insert(overall.end(), cross.begin(), cross.end());
  row.overall_mean = mean_of(overall);
  row.zero_shot_mean = mean_of(zero);
  return row;
}

std::vector<double> ranks_descending(std::span<const double> scores) {
  const size_t n = scores.size();
  std::vector<int> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[static_cast<size_t>(a)] != scores[static_cast<size_t>(b)]) {
      return scores[static_cast<size_t>(a)] > scores[static_cast<size_t>(b)];
    }
    return a < b;
  });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[static_cast<size_t>(order[j + 1])] ==
                            scores[static_cast<size_t>(order[i])]) {
      ++j;
    }
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (size_t p = i; p <= j; ++p) ranks[static_cast<size_t>(order[p])] = avg;
    i = j + 1;
  }
  return ranks;
}

double mean_rank(std::span<const double> task_ranks) {
  if (task_ranks.empty()) throw DataError("mean_rank: no ranks");
  double sum = 0;
  for (double r : task_ranks) sum += r;
  return sum / static_cast<double>(task_ranks.size());
}

TargetRankTable rank_targets(const std::vector<ScoreMatrix>& matrices,
                             const std::vector<std::string>& target_subset) {
  if (matrices.empty()) throw DataError("rank_targets: no matrices");
  TargetRankTable table;
  for (const auto& m : matrices) table.tasks.push_back(m.task);

  // keep only targets present (as a row) in every task
  std::vector<std::string> targets;
  for (const std::string& t : target_subset) {
    bool everywhere = true;
    for (const auto& m : matrices) {
      if (!std::binary_search(m.targets.begin(), m.targets.end(), t)) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) {
      targets.push_back(t);
    } else {
      table.excluded_targets.push_back(t);
    }
  }
  if (targets.empty()) throw DataError("rank_targets: no target present in all tasks");

  std::map<std::string, TargetRankRow> rows;
  std::map<std::string, std::vector<double>> per_task_ranks;
  for (const std::string& t : targets) {
    rows[t].target = t;
    rows[t].cross_means.resize(matrices.size());
    rows[t].zero_shots.resize(matrices.size());
  }

  for (size_t mi = 0; mi < matrices.size(); ++mi) {
    const ScoreMatrix& m = matrices[mi];
    std::vector<std::string> ids;
    std::vector<double> means;
    for (const std::string& t : targets) {
      std::vector<double> row_scores;
      for (const std::string& s : m.sources) {
        if (s == t) continue;  // monolingual excluded
        if (auto v = m.at(s, t)) row_scores.push_back(*v);
      }
      auto mean = mean_of(row_scores);
      rows[t].cross_means[mi] = mean;
      auto zs = m.zero_shot.find(t);
      if (zs != m.zero_shot.end()) rows[t].zero_shots[mi] = zs->second;
      if (mean) {
        ids.push_back(t);
        means.push_back(*mean);
      }
    }
    std::vector<double> ranks = ranks_descending(means);
    for (size_t i = 0; i < ids.size(); ++i) per_task_ranks[ids[i]].push_back(ranks[i]);
  }

  for (const std::string& t : targets) {
    auto it = per_task_ranks.find(t);
    if (it == per_task_ranks.end() || it->second.size() != matrices.size()) {
      table.excluded_targets.push_back(t);
      continue;
    }
    rows[t].mean_rank = mean_rank(it->second);
    table.rows.push_back(std::move(rows[t]));
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
    if (a.mean_rank != b.mean_rank) return a.mean_rank < b.mean_rank;
    return a.target < b.target;
  });
  return table;
}

SourceRankTable rank_sources(const std::vector<ScoreMatrix>& matrices,
                             const std::vector<std::string>& source_subset,
                             TargetFilter filter) {
  if (matrices.empty()) throw DataError("rank_sources: no matrices");
  SourceRankTable table;
  for (const auto& m : matrices) table.tasks.push_back(m.task);

  std::map<std::string, SourceRankRow> rows;
  for (const std::string& s : source_subset) {
    rows[s].source = s;
    rows[s].scores.resize(matrices.size());
    rows[s].ranks.resize(matrices.size());
  }

  for (size_t mi = 0; mi < matrices.size(); ++mi) {
    const ScoreMatrix& m = matrices[mi];
    std::vector<std::string> included_targets;
    for (const std::string& t : m.targets) {
      const bool is_source =
          std::binary_search(m.sources.begin(), m.sources.end(), t);
      if (filter == TargetFilter::kLowResourceOnly && is_source) continue;
      included_targets.push_back(t);
    }
    if (included_targets.empty()) {
      throw DataError("rank_sources: no targets left after filtering in task " + m.task);
    }
    std::vector<std::string> ids;
    std::vector<double> means;
    for (const std::string& s : source_subset) {
      std::vector<double> col;
      for (const std::string& t : included_targets) {
        if (s == t) continue;  // monolingual excluded
        if (auto v = m.at(s, t)) col.push_back(*v);
      }
      auto mean = mean_of(col);
      rows[s].scores[mi] = mean;
      if (mean) {
        ids.push_back(s);
        means.push_back(*mean);
      }
    }
    std::vector<double> ranks = ranks_descending(means);
    for (size_t i = 0; i < ids.size(); ++i) rows[ids[i]].ranks[mi] = ranks[i];
  }

  for (const std::string& s : source_subset) {
    std::vector<double> ranks;
    for (const auto& r : rows[s].ranks) {
      if (r) ranks.push_back(*r);
    }
    if (ranks.empty()) continue;  // source scored in no task
    rows[s].mean_rank = mean_rank(ranks);
    table.rows.push_back(std::move(rows[s]));
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
    if (a.mean_rank != b.mean_rank) return a.mean_rank < b.mean_rank;
    return a.source < b.source;
  });
  return table;
}

std::vector<BestSourceRow> best_source_per_target(const ScoreMatrix& matrix) {
  std::vector<BestSourceRow> rows;
  for (const std::string& t : matrix.targets) {
    BestSourceRow best;
    best.target = t;
    bool found = false;
    bool tied = false;
    for (const std::string& s : matrix.sources) {
      if (s == t) continue;
      auto v = matrix.at(s, t);
      if (!v) continue;
      if (!found || *v > best.score) {
        best.source = s;
        best.score = *v;
        found = true;
        tied = false;
      } else if (*v == best.score) {
        tied = true;  // sources scan in id order, first one stays
      }
    }
    if (found) {
      best.tied = tied;
      rows.push_back(std::move(best));
    }
  }
  return rows;
}

namespace {

struct AxisVectors {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> vectors;  // mean-imputed
};

AxisVectors axis_vectors(const ScoreMatrix& matrix, Axis axis) {
  AxisVectors out;
  const auto& items = axis == Axis::kRows ? matrix.targets : matrix.sources;
  const auto& dims = axis == Axis::kRows ? matrix.sources : matrix.targets;
  out.labels = items;
  for (const std::string& item : items) {
    std::vector<double> vec(dims.size(), std::numeric_limits<double>::quiet_NaN());
    double sum = 0;
    size_t count = 0;
    for (size_t d = 0; d < dims.size(); ++d) {
      auto v = axis == Axis::kRows ? matrix.at(dims[d], item) : matrix.at(item, dims[d]);
      if (v) {
        vec[d] = *v;
        sum += *v;
        ++count;
      }
    }
    const double fill = count > 0 ? sum / static_cast<double>(count) : 0.0;
    for (double& x : vec) {
      if (std::isnan(x)) x = fill;
    }
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0;
  for (size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

}  // namespace

Dendrogram hierarchical_cluster(const ScoreMatrix& matrix, Axis axis) {
  AxisVectors av = axis_vectors(matrix, axis);
  const size_t n = av.vectors.size();
  if (n < 2) throw DataError("hierarchical_cluster: need at least 2 vectors on the axis");

  Dendrogram dendro;
  dendro.leaf_labels = av.labels;

  struct Cluster {
    int node;             // dendrogram node id
    size_t size;          // leaves inside
    std::string min_leaf; // lexicographically smallest leaf label
  };
  std::vector<Cluster> clusters;
  for (size_t i = 0; i < n; ++i) {
    clusters.push_back(Cluster{static_cast<int>(i), 1, av.labels[i]});
  }
  // distance matrix over active cluster slots, updated by Lance-Williams
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      dist[i][j] = dist[j][i] = euclidean(av.vectors[i], av.vectors[j]);
    }
  }
  std::vector<bool> active(n, true);

  for (size_t merge_step = 0; merge_step + 1 < n; ++merge_step) {
    // minimal distance; ties resolved on the pair's sorted min-leaf labels
    double best = std::numeric_limits<double>::infinity();
    size_t bi = 0, bj = 0;
    auto tie_key = [&](size_t i, size_t j) {
      return std::minmax(clusters[i].min_leaf, clusters[j].min_leaf);
    };
    bool found = false;
    for (size_t i = 0; i < clusters.size(); ++i) {
      if (!active[i]) continue;
      for (size_t j = i + 1; j < clusters.size(); ++j) {
        if (!active[j]) continue;
        const double d = dist[i][j];
        if (!found || d < best || (d == best && tie_key(i, j) < tie_key(bi, bj))) {
          best = d;
          bi = i;
          bj = j;
          found = true;
        }
      }
    }

    const int new_node = static_cast<int>(n + merge_step);
    dendro.merges.push_back(
        Dendrogram::Merge{clusters[bi].node, clusters[bj].node, best});

    // UPGMA update into slot bi, deactivate bj
    const double na = static_cast<double>(clusters[bi].size);
    const double nb = static_cast<double>(clusters[bj].size);
    for (size_t k = 0; k < clusters.size(); ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      const double d = (na * dist[bi][k] + nb * dist[bj][k]) / (na + nb);
      dist[bi][k] = dist[k][bi] = d;
    }
    clusters[bi].node = new_node;
    clusters[bi].size += clusters[bj].size;
    clusters[bi].min_leaf = std::min(clusters[bi].min_leaf, clusters[bj].min_leaf);
    active[bj] = false;
  }
  return dendro;
}

namespace {

struct NodeView {
  double height;
  std::string min_leaf;
};

void order_walk(const Dendrogram& d, int node, const std::vector<NodeView>& views,
                std::vector<int>* out) {
  const int n = static_cast<int>(d.leaf_labels.size());
  if (node < n) {
    out->push_back(node);
    return;
  }
  const auto& m = d.merges[static_cast<size_t>(node - n)];
  int first = m.a, second = m.b;
  const NodeView& va = views[static_cast<size_t>(m.a)];
  const NodeView& vb = views[static_cast<size_t>(m.b)];
  if (vb.height < va.height ||
      (vb.height == va.height && vb.min_leaf < va.min_leaf)) {
    std::swap(first, second);
  }
  order_walk(d, first, views, out);
  order_walk(d, second, views, out);
}

std::vector<NodeView> node_views(const Dendrogram& d) {
  const size_t n = d.leaf_labels.size();
  std::vector<NodeView> views(n + d.merges.size());
  for (size_t i = 0; i < n; ++i) views[i] = NodeView{0.0, d.leaf_labels[i]};
  for (size_t k = 0; k < d.merges.size(); ++k) {
    const auto& m = d.merges[k];
    views[n + k] = NodeView{
        m.height, std::min(views[static_cast<size_t>(m.a)].min_leaf,
                           views[static_cast<size_t>(m.b)].min_leaf)};
  }
  return views;
}

void tree_string(const Dendrogram& d, int node, const std::vector<NodeView>& views,
                 std::ostringstream* out) {
  const int n = static_cast<int>(d.leaf_labels.size());
  if (node < n) {
    *out << d.leaf_labels[static_cast<size_t>(node)];
    return;
  }
  const auto& m = d.merges[static_cast<size_t>(node - n)];
  int first = m.a, second = m.b;
  const NodeView& va = views[static_cast<size_t>(m.a)];
  const NodeView& vb = views[static_cast<size_t>(m.b)];
  if (vb.height < va.height ||
      (vb.height == va.height && vb.min_leaf < va.min_leaf)) {
    std::swap(first, second);
  }
  *out << "(";
  tree_string(d, first, views, out);
  *out << ",";
  tree_string(d, second, views, out);
  *out << "):" << format_double(m.height);
}

}  // namespace

std::vector<int> Dendrogram::leaf_order() const {
  if (merges.empty()) {
    std::vector<int> order;
    for (size_t i = 0; i < leaf_labels.size(); ++i) order.push_back(static_cast<int>(i));
    return order;
  }
  std::vector<int> order;
  order.reserve(leaf_labels.size());
  auto views = node_views(*this);
  order_walk(*this, static_cast<int>(leaf_labels.size() + merges.size()) - 1, views, &order);
  return order;
}

std::string Dendrogram::to_string() const {
  std::ostringstream out;
  auto views = node_views(*this);
  tree_string(*this, static_cast<int>(leaf_labels.size() + merges.size()) - 1, views, &out);
  return out.str();
}

std::string render_heatmap_svg(const ScoreMatrix& matrix) {
  const std::vector<int> row_order =
      matrix.targets.size() >= 2
          ? hierarchical_cluster(matrix, Axis::kRows).leaf_order()
          : std::vector<int>{0};
  const std::vector<int> col_order =
      matrix.sources.size() >= 2
          ? hierarchical_cluster(matrix, Axis::kColumns).leaf_order()
          : std::vector<int>(matrix.sources.empty() ? 0 : 1, 0);

  constexpr int kCell = 18;
  constexpr int kLabel = 90;
  const int cols = static_cast<int>(col_order.size()) + 1;  // zero-shot leftmost
  const int rows = static_cast<int>(row_order.size());
  const int width = kLabel + cols * kCell + 10;
  const int height = kLabel + rows * kCell + 10;

  auto ramp = [](double v) {
    // blue (0) to red (1), linear over the metric range
    const int r = static_cast<int>(std::lround(255.0 * v));
    const int b = static_cast<int>(std::lround(255.0 * (1.0 - v)));
    std::ostringstream c;
    c << "rgb(" << r << ",60," << b << ")";
    return c.str();
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<style>text{font-family:monospace;font-size:9px;}</style>\n";
  auto cell = [&](int cx, int cy, std::optional<double> v) {
    svg << "<rect x=\"" << kLabel + cx * kCell << "\" y=\"" << kLabel + cy * kCell
        << "\" width=\"" << kCell - 1 << "\" height=\"" << kCell - 1 << "\" fill=\""
        << (v ? ramp(std::clamp(*v, 0.0, 1.0)) : std::string("rgb(220,220,220)"))
        << "\"/>\n";
  };
  for (int ry = 0; ry < rows; ++ry) {
    const std::string& target = matrix.targets[static_cast<size_t>(row_order[static_cast<size_t>(ry)])];
    svg << "<text x=\"2\" y=\"" << kLabel + ry * kCell + 12 << "\">" << target
        << "</text>\n";
    auto zs = matrix.zero_shot.find(target);
    cell(0, ry, zs == matrix.zero_shot.end() ? std::nullopt
                                             : std::optional<double>(zs->second));
    for (int cx = 0; cx < cols - 1; ++cx) {
      const std::string& source =
          matrix.sources[static_cast<size_t>(col_order[static_cast<size_t>(cx)])];
      cell(cx + 1, ry, matrix.at(source, target));
    }
  }
  svg << "<text x=\"" << kLabel << "\" y=\"" << kLabel - 6
      << "\" transform=\"rotate(-60 " << kLabel << " " << kLabel - 6
      << ")\">zero-shot</text>\n";
  for (int cx = 0; cx < cols - 1; ++cx) {
    const int x = kLabel + (cx + 1) * kCell;
    svg << "<text x=\"" << x << "\" y=\"" << kLabel - 6 << "\" transform=\"rotate(-60 "
        << x << " " << kLabel - 6 << ")\">"
        << matrix.sources[static_cast<size_t>(col_order[static_cast<size_t>(cx)])]
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace xfer::stats
