// xferrank: predicts and explains which source programming language
// transfers best to a target language and task, from completed transfer
// score matrices, pairwise language features and a learned ranking model.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xfer/boosting.hpp"
#include "xfer/common.hpp"
#include "xfer/features.hpp"
#include "xfer/histogram.hpp"
#include "xfer/lexer.hpp"
#include "xfer/manifest.hpp"
#include "xfer/profiles.hpp"
#include "xfer/ranking.hpp"
#include "xfer/score_matrix.hpp"
#include "xfer/shap.hpp"
#include "xfer/stats.hpp"

namespace fs = std::filesystem;
using namespace xfer;

namespace {

struct TrainFlags {
  gbt::TrainConfig config;
  int num_grades = 5;
  bool include_mono = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--trees", config.num_trees, "Boosting rounds (default 100)");
    cmd->add_option("--leaves", config.max_leaves, "Max leaves per tree (default 16)");
    cmd->add_option("--learning-rate", config.learning_rate, "Shrinkage (default 0.1)");
    cmd->add_option("--min-samples", config.min_samples_per_leaf,
                    "Min rows per leaf (default 1)");
    cmd->add_option("--l2", config.l2_leaf_reg, "L2 leaf regularization (default 0)");
    cmd->add_option("--sigma", config.sigma, "Pairwise logistic sharpness (default 1)");
    cmd->add_option("--k", config.ndcg_truncation, "NDCG truncation K (default 3)");
    cmd->add_option("--grades", num_grades, "Relevance grades (default 5)");
    cmd->add_flag("--include-mono", include_mono,
                  "Keep monolingual rows in query groups");
    cmd->add_option("--seed", config.seed, "Random seed (default 0)");
  }

  std::map<std::string, std::string> snapshot() const {
    return {
        {"trees", std::to_string(config.num_trees)},
        {"leaves", std::to_string(config.max_leaves)},
        {"learning_rate", format_double(config.learning_rate)},
        {"min_samples", std::to_string(config.min_samples_per_leaf)},
        {"l2", format_double(config.l2_leaf_reg)},
        {"sigma", format_double(config.sigma)},
        {"k", std::to_string(config.ndcg_truncation)},
        {"grades", std::to_string(num_grades)},
        {"include_mono", include_mono ? "1" : "0"},
    };
  }
};

const ScoreMatrix& matrix_for_task(const std::map<std::string, ScoreMatrix>& matrices,
                                   const std::string& task) {
  auto it = matrices.find(task);
  if (it == matrices.end()) {
    std::string known;
    for (const auto& [name, m] : matrices) known += (known.empty() ? "" : ", ") + name;
    throw DataError("task '" + task + "' not in score file (tasks: " + known + ")");
  }
  return it->second;
}

std::set<std::string> parse_seen(const std::string& csv) {
  if (csv.empty()) return feat::default_seen_set();
  std::set<std::string> out;
  for (const auto& id : split(csv, ',')) {
    auto t = trim(id);
    if (!t.empty()) out.insert(std::string(t));
  }
  return out;
}

std::map<std::string, lex::TokenHistogram> load_histogram_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("not a histogram directory: " + dir.string());
  std::map<std::string, lex::TokenHistogram> out;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".tokhist") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    lex::TokenHistogram hist = lex::load_histogram(file);
    out.emplace(hist.language(), std::move(hist));
  }
  if (out.empty()) throw DataError("no .tokhist files under " + dir.string());
  return out;
}

int cmd_features(const fs::path& corpus, const fs::path& langdef_dir, const fs::path& out,
                 std::optional<size_t> max_files, std::uint64_t seed) {
  std::map<std::string, lex::TokenDefinition> defs;
  for (const auto& entry : fs::directory_iterator(langdef_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    lex::TokenDefinition def = lex::load_langdef(entry.path());
    const std::string lang = def.language;
    if (!defs.emplace(lang, std::move(def)).second) {
      throw DataError("duplicate langdef for language " + lang);
    }
  }
  if (defs.empty()) throw DataError("no langdef documents under " + langdef_dir.string());
  if (!fs::is_directory(corpus)) throw DataError("empty corpus: " + corpus.string());

  fs::create_directories(out);
  RunManifest manifest;
  manifest.command = "features";
  manifest.inputs["corpus"] = corpus.generic_string();
  manifest.inputs["langdefs"] = "langdef.v1:" + langdef_dir.generic_string();
  manifest.seed = seed;
  manifest.config["max_files"] = max_files ? std::to_string(*max_files) : "all";

  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(corpus)) {
    if (entry.is_directory()) subdirs.push_back(entry.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  if (subdirs.empty()) throw DataError("empty corpus: no per-language subdirectories");

  size_t built = 0;
  for (const auto& subdir : subdirs) {
    const std::string lang = subdir.filename().string();
    auto def = defs.find(lang);
    if (def == defs.end()) {
      std::cerr << "warning: no langdef for corpus subdirectory '" << lang
                << "', skipped\n";
      continue;
    }
    lex::BuildResult result = lex::build_histogram(subdir, def->second, max_files, seed);
    for (const auto& diag : result.diagnostics) {
      std::cerr << "warning: " << def->second.language << ": " << diag.message;
      if (!diag.file.empty()) std::cerr << " (" << diag.file << ")";
      std::cerr << "\n";
    }
    const fs::path hist_path = out / (lang + ".tokhist");
    lex::save_histogram(result.histogram, hist_path);
    manifest.outputs.push_back(hist_path);
    ++built;
  }
  if (built == 0) throw DataError("empty corpus: no language subdirectory had a langdef");
  manifest.write(out / "manifest.json");
  std::cout << "wrote " << built << " histogram(s) to " << out.generic_string() << "\n";
  return 0;
}

int cmd_pairs(const fs::path& hist_dir, const fs::path& profiles_path,
              const std::string& stats_path, const std::string& seen_csv,
              const fs::path& out) {
  feat::ProfileTable profiles = feat::load_profiles(profiles_path);
  auto histograms = load_histogram_dir(hist_dir);
  feat::DatasetStatsTable stats;
  if (!stats_path.empty()) stats = feat::load_dataset_stats(stats_path);
  std::set<std::string> seen = parse_seen(seen_csv);

  feat::AssemblyInputs inputs;
  inputs.profiles = &profiles;
  inputs.histograms = &histograms;
  inputs.dataset_stats = stats_path.empty() ? nullptr : &stats;
  inputs.seen_set = &seen;

  std::vector<std::string> languages;
  for (const auto& [id, profile] : profiles) {
    if (histograms.count(id)) languages.push_back(id);
  }
  if (languages.empty()) {
    throw DataError("no profile language has a histogram; nothing to pair");
  }

  std::vector<feat::PairFeatureVector> rows;
  for (const std::string& source : languages) {
    for (const std::string& target : languages) {
      rows.push_back(feat::assemble_pair_features(inputs, source, target));
    }
  }
  feat::save_pair_features(rows, out);

  RunManifest manifest;
  manifest.command = "pairs";
  manifest.inputs["histograms"] = "tokhist.v1:" + hist_dir.generic_string();
  manifest.inputs["profiles"] = "langprof.v1:" + profiles_path.generic_string();
  if (!stats_path.empty()) manifest.inputs["dataset_stats"] = "dstats.v1:" + stats_path;
  manifest.config["seen"] = seen_csv.empty() ? "default" : seen_csv;
  manifest.outputs.push_back(out);
  manifest.write(out.string() + ".manifest.json");
  std::cout << "wrote " << rows.size() << " pair rows to " << out.generic_string() << "\n";
  return 0;
}

int cmd_train(const fs::path& pairs_path, const fs::path& scores_path,
              const std::string& task, const std::string& objective,
              const TrainFlags& flags, const fs::path& out) {
  auto pair_rows = feat::load_pair_features(pairs_path);
  auto pairs = feat::index_pairs(pair_rows);
  auto matrices = load_score_matrices(scores_path);
  const ScoreMatrix& matrix = matrix_for_task(matrices, task);

  std::vector<std::string> names(feat::feature_names().begin(), feat::feature_names().end());
  auto groups = rank::build_query_groups(matrix, pairs, flags.include_mono, flags.num_grades);

  gbt::Ensemble model;
  if (objective == "lambdarank") {
    model = gbt::train_lambdarank(groups, flags.config, names);
  } else if (objective == "regression") {
    size_t rows = 0;
    for (const auto& g : groups) rows += g.rows.size();
    if (rows == 0) throw DataError("no training rows for task " + task);
    gbt::DataMatrix x(rows, feat::kNumFeatures);
    std::vector<double> y;
    size_t at = 0;
    for (const auto& g : groups) {
      for (size_t i = 0; i < g.rows.size(); ++i) {
        for (size_t c = 0; c < static_cast<size_t>(feat::kNumFeatures); ++c) {
          x.at(at, c) = g.rows[i][c];
        }
        y.push_back(g.raw_scores[i]);
        ++at;
      }
    }
    model = gbt::train_regression(x, y, flags.config, names);
  } else {
    throw UsageError("unknown objective '" + objective + "' (lambdarank|regression)");
  }
  gbt::save_model(model, out);

  RunManifest manifest;
  manifest.command = "train";
  manifest.inputs["pairs"] = "featvec.v1:" + pairs_path.generic_string();
  manifest.inputs["scores"] = "scores.v1:" + scores_path.generic_string();
  manifest.config = flags.snapshot();
  manifest.config["task"] = task;
  manifest.config["objective"] = objective;
  manifest.seed = flags.config.seed;
  manifest.outputs.push_back(out);
  manifest.write(out.string() + ".manifest.json");
  std::cout << "trained " << objective << " model on " << groups.size()
            << " query groups -> " << out.generic_string() << "\n";
  return 0;
}

int cmd_rank(const fs::path& model_path, const fs::path& pairs_path,
             const std::string& target, int k, const std::string& out_path) {
  gbt::Ensemble model = gbt::load_model(model_path);
  auto pair_rows = feat::load_pair_features(pairs_path);
  std::vector<feat::PairFeatureVector> candidates;
  for (const auto& row : pair_rows) {
    if (row.target == target && row.source != target) candidates.push_back(row);
  }
  auto ranked = rank::rank_sources(model, target, candidates, k);

  std::ostringstream table;
  table << "rank,source,score\n";
  for (size_t i = 0; i < ranked.size(); ++i) {
    table << (i + 1) << "," << ranked[i].first << "," << format_double(ranked[i].second)
          << "\n";
  }
  if (out_path.empty()) {
    std::cout << table.str();
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError("cannot write ranking: " + out_path);
    out << table.str();
    RunManifest manifest;
    manifest.command = "rank";
    manifest.inputs["model"] = "gbrank.v1:" + model_path.generic_string();
    manifest.inputs["pairs"] = "featvec.v1:" + pairs_path.generic_string();
    manifest.config["target"] = target;
    manifest.config["k"] = std::to_string(k);
    manifest.outputs.push_back(out_path);
    manifest.write(out_path + ".manifest.json");
  }
  return 0;
}

int cmd_evaluate(const fs::path& pairs_path, const fs::path& scores_path,
                 const std::string& task, const std::string& method_name,
                 const std::string& history_path, const TrainFlags& flags,
                 const std::string& out_path) {
  auto method = rank::method_from_name(method_name);
  if (!method) throw UsageError("unknown method '" + method_name + "'");
  auto pair_rows = feat::load_pair_features(pairs_path);
  auto pairs = feat::index_pairs(pair_rows);
  auto matrices = load_score_matrices(scores_path);
  const ScoreMatrix& matrix = matrix_for_task(matrices, task);

  rank::HistoryGraph graph;
  rank::EvalConfig config;
  config.method = *method;
  config.k = flags.config.ndcg_truncation;
  config.num_grades = flags.num_grades;
  config.include_mono = flags.include_mono;
  config.train = flags.config;
  if (*method == rank::RankMethod::kHistory) {
    if (history_path.empty()) throw UsageError("--history FILE required for --method history");
    graph = rank::load_history_graph(history_path);
    config.history = &graph;
  }

  rank::EvalReport report = rank::loo_cv(matrix, pairs, config);
  const std::string table = rank::format_report(report);
  if (out_path.empty()) {
    std::cout << table;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw DataError("cannot write report: " + out_path);
    out << table;
    RunManifest manifest;
    manifest.command = "evaluate";
    manifest.inputs["pairs"] = "featvec.v1:" + pairs_path.generic_string();
    manifest.inputs["scores"] = "scores.v1:" + scores_path.generic_string();
    if (!history_path.empty()) manifest.inputs["history"] = "plhist.v1:" + history_path;
    manifest.config = flags.snapshot();
    manifest.config["task"] = task;
    manifest.config["method"] = method_name;
    manifest.seed = flags.config.seed;
    manifest.outputs.push_back(out_path);
    manifest.write(out_path + ".manifest.json");
  }
  return 0;
}

int cmd_explain(const fs::path& model_path, const fs::path& pairs_path,
                const std::string& task, const fs::path& out) {
  gbt::Ensemble model = gbt::load_model(model_path);
  auto pair_rows = feat::load_pair_features(pairs_path);
  if (pair_rows.empty()) throw DataError("no pair rows in " + pairs_path.string());
  std::vector<std::vector<double>> rows;
  rows.reserve(pair_rows.size());
  for (const auto& row : pair_rows) rows.push_back(row.dense());

  shap::ImportanceTable table = shap::aggregate_importance(model, rows, task);
  shap::save_importance(table, out);

  RunManifest manifest;
  manifest.command = "explain";
  manifest.inputs["model"] = "gbrank.v1:" + model_path.generic_string();
  manifest.inputs["pairs"] = "featvec.v1:" + pairs_path.generic_string();
  manifest.config["task"] = task;
  manifest.outputs.push_back(out);
  manifest.write(out.string() + ".manifest.json");
  std::cout << "wrote importance table for " << rows.size() << " pairs -> "
            << out.generic_string() << "\n";
  return 0;
}

std::vector<std::string> common_ids(const std::vector<ScoreMatrix>& matrices, bool targets) {
  std::map<std::string, size_t> counts;
  for (const auto& m : matrices) {
    for (const auto& id : targets ? m.targets : m.sources) ++counts[id];
  }
  std::vector<std::string> out;
  for (const auto& [id, count] : counts) {
    if (count == matrices.size()) out.push_back(id);
  }
  return out;
}

int cmd_stats(const fs::path& scores_path, const fs::path& out_dir,
              const std::string& targets_csv, const std::string& sources_csv,
              bool low_resource_only) {
  auto matrices_map = load_score_matrices(scores_path);
  std::vector<ScoreMatrix> matrices;
  for (const auto& [task, m] : matrices_map) matrices.push_back(m);
  fs::create_directories(out_dir);

  RunManifest manifest;
  manifest.command = "stats";
  manifest.inputs["scores"] = "scores.v1:" + scores_path.generic_string();
  manifest.config["low_resource_only"] = low_resource_only ? "1" : "0";

  {  // per-task summary means
    std::ofstream out(out_dir / "summary.csv", std::ios::binary);
    out << "task,mono,cross,overall,zero_shot\n";
    auto fmt = [](std::optional<double> v) { return v ? format_double(*v) : std::string(); };
    for (const auto& m : matrices) {
      stats::SummaryRow row = stats::summary_scores(m);
      out << row.task << "," << fmt(row.mono_mean) << "," << fmt(row.cross_mean) << ","
          << fmt(row.overall_mean) << "," << fmt(row.zero_shot_mean) << "\n";
    }
    manifest.outputs.push_back(out_dir / "summary.csv");
  }

  auto fmt_opt = [](std::optional<double> v) {
    return v ? format_double(*v) : std::string();
  };

  {  // target mean-rank table
    std::vector<std::string> subset;
    if (targets_csv.empty()) {
      subset = common_ids(matrices, /*targets=*/true);
    } else {
      for (const auto& id : split(targets_csv, ',')) subset.push_back(std::string(trim(id)));
    }
    stats::TargetRankTable table = stats::rank_targets(matrices, subset);
    std::ofstream out(out_dir / "target_ranks.csv", std::ios::binary);
    out << "target";
    for (const auto& task : table.tasks) out << "," << task << "_cross," << task << "_zero_shot";
    out << ",mean_rank\n";
    for (const auto& row : table.rows) {
      out << row.target;
      for (size_t i = 0; i < table.tasks.size(); ++i) {
        out << "," << fmt_opt(row.cross_means[i]) << "," << fmt_opt(row.zero_shots[i]);
      }
      out << "," << format_double(row.mean_rank) << "\n";
    }
    for (const auto& excluded : table.excluded_targets) {
      out << "# excluded (missing in some task): " << excluded << "\n";
    }
    manifest.outputs.push_back(out_dir / "target_ranks.csv");
  }

  {  // source mean-rank table
    std::vector<std::string> subset;
    if (sources_csv.empty()) {
      subset = common_ids(matrices, /*targets=*/false);
    } else {
      for (const auto& id : split(sources_csv, ',')) subset.push_back(std::string(trim(id)));
    }
    stats::SourceRankTable table = stats::rank_sources(
        matrices, subset,
        low_resource_only ? stats::TargetFilter::kLowResourceOnly : stats::TargetFilter::kAll);
    std::ofstream out(out_dir / "source_ranks.csv", std::ios::binary);
    out << "source";
    for (const auto& task : table.tasks) out << "," << task << "_score," << task << "_rank";
    out << ",mean_rank\n";
    for (const auto& row : table.rows) {
      out << row.source;
      for (size_t i = 0; i < table.tasks.size(); ++i) {
        out << "," << fmt_opt(row.scores[i]) << "," << fmt_opt(row.ranks[i]);
      }
      out << "," << format_double(row.mean_rank) << "\n";
    }
    manifest.outputs.push_back(out_dir / "source_ranks.csv");
  }

  {  // best source per target, per task
    std::ofstream out(out_dir / "best_sources.csv", std::ios::binary);
    out << "task,target,source,score,tied\n";
    for (const auto& m : matrices) {
      for (const auto& row : stats::best_source_per_target(m)) {
        out << m.task << "," << row.target << "," << row.source << ","
            << format_double(row.score) << "," << (row.tied ? "1" : "0") << "\n";
      }
    }
    manifest.outputs.push_back(out_dir / "best_sources.csv");
  }

  manifest.write(out_dir / "manifest.json");
  std::cout << "wrote stats tables to " << out_dir.generic_string() << "\n";
  return 0;
}

int cmd_cluster(const fs::path& scores_path, const std::string& task,
                const std::string& axis_name, const fs::path& out,
                const std::string& svg_path) {
  auto matrices = load_score_matrices(scores_path);
  const ScoreMatrix& matrix = matrix_for_task(matrices, task);
  stats::Axis axis;
  if (axis_name == "rows") {
    axis = stats::Axis::kRows;
  } else if (axis_name == "columns") {
    axis = stats::Axis::kColumns;
  } else {
    throw UsageError("unknown axis '" + axis_name + "' (rows|columns)");
  }
  stats::Dendrogram dendro = stats::hierarchical_cluster(matrix, axis);

  std::ofstream fout(out, std::ios::binary);
  if (!fout) throw DataError("cannot write dendrogram: " + out.string());
  fout << "# dendrogram.v1 linkage=average distance=euclidean axis=" << axis_name << "\n";
  fout << dendro.to_string() << "\n";
  fout << "leaf-order:";
  for (int leaf : dendro.leaf_order()) {
    fout << " " << dendro.leaf_labels[static_cast<size_t>(leaf)];
  }
  fout << "\n";
  fout.close();

  RunManifest manifest;
  manifest.command = "cluster";
  manifest.inputs["scores"] = "scores.v1:" + scores_path.generic_string();
  manifest.config["task"] = task;
  manifest.config["axis"] = axis_name;
  manifest.outputs.push_back(out);
  if (!svg_path.empty()) {
    std::ofstream svg(svg_path, std::ios::binary);
    if (!svg) throw DataError("cannot write svg: " + svg_path);
    svg << stats::render_heatmap_svg(matrix);
    manifest.outputs.push_back(svg_path);
  }
  manifest.write(out.string() + ".manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-lingual transfer source ranking toolkit"};
  app.set_version_flag("--version", std::string(kToolkitVersion));
  app.require_subcommand(1);

  // features
  auto* features = app.add_subcommand("features", "Tokenize corpora into vocabulary histograms");
  fs::path f_corpus, f_langdefs, f_out;
  std::optional<size_t> f_max_files;
  std::uint64_t f_seed = 0;
  features->add_option("--corpus", f_corpus, "Corpus root with per-language subdirectories")
      ->required();
  features->add_option("--langdefs", f_langdefs, "Directory of langdef.v1 documents")->required();
  features->add_option("--out", f_out, "Output directory for .tokhist files")->required();
  features->add_option("--max-files", f_max_files, "Sample at most N files per language");
  features->add_option("--seed", f_seed, "Sampling seed (default 0)");

  // pairs
  auto* pairs = app.add_subcommand("pairs", "Assemble pairwise feature vectors");
  fs::path p_hist, p_profiles, p_out;
  std::string p_stats, p_seen;
  pairs->add_option("--histograms", p_hist, "Directory of .tokhist files")->required();
  pairs->add_option("--profiles", p_profiles, "langprof.v1 document")->required();
  pairs->add_option("--stats", p_stats, "dstats.v1 CSV (optional)");
  pairs->add_option("--seen", p_seen, "Comma-separated pretraining languages (default: CodeT5 set)");
  pairs->add_option("--out", p_out, "Output featvec.v1 file")->required();

  // train
  auto* train = app.add_subcommand("train", "Train a ranking or regression model");
  fs::path t_pairs, t_scores, t_out;
  std::string t_task, t_objective = "lambdarank";
  TrainFlags t_flags;
  train->add_option("--pairs", t_pairs, "featvec.v1 file")->required();
  train->add_option("--scores", t_scores, "scores.v1 file")->required();
  train->add_option("--task", t_task, "Task id within the score file")->required();
  train->add_option("--objective", t_objective, "lambdarank|regression (default lambdarank)");
  train->add_option("--out", t_out, "Output gbrank.v1 model file")->required();
  t_flags.attach(train);

  // rank
  auto* rank_cmd = app.add_subcommand("rank", "Rank candidate sources for a target");
  fs::path r_model, r_pairs;
  std::string r_target, r_out;
  int r_k = 3;
  rank_cmd->add_option("--model", r_model, "gbrank.v1 model file")->required();
  rank_cmd->add_option("--pairs", r_pairs, "featvec.v1 file")->required();
  rank_cmd->add_option("--target", r_target, "Target language id")->required();
  rank_cmd->add_option("--k", r_k, "Cutoff (default 3)");
  rank_cmd->add_option("--out", r_out, "Output file (stdout when omitted)");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Leave-one-out NDCG@K evaluation");
  fs::path e_pairs, e_scores;
  std::string e_task, e_method = "ranker", e_history, e_out;
  TrainFlags e_flags;
  evaluate->add_option("--pairs", e_pairs, "featvec.v1 file")->required();
  evaluate->add_option("--scores", e_scores, "scores.v1 file")->required();
  evaluate->add_option("--task", e_task, "Task id within the score file")->required();
  evaluate->add_option("--method", e_method, "ranker|regression|history (default ranker)");
  evaluate->add_option("--history", e_history, "plhist.v1 graph (history method)");
  evaluate->add_option("--out", e_out, "Output report file (stdout when omitted)");
  e_flags.attach(evaluate);

  // explain
  auto* explain = app.add_subcommand("explain", "Aggregate per-feature attribution");
  fs::path x_model, x_pairs, x_out;
  std::string x_task;
  explain->add_option("--model", x_model, "gbrank.v1 model file")->required();
  explain->add_option("--pairs", x_pairs, "featvec.v1 file")->required();
  explain->add_option("--task", x_task, "Task id stamped into the table")->required();
  explain->add_option("--out", x_out, "Output shapimp.v1 file")->required();

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Transfer analytics tables");
  fs::path s_scores, s_out;
  std::string s_targets, s_sources;
  bool s_low_resource = false;
  stats_cmd->add_option("--scores", s_scores, "scores.v1 file")->required();
  stats_cmd->add_option("--out", s_out, "Output directory")->required();
  stats_cmd->add_option("--targets", s_targets, "Target subset (default: common to all tasks)");
  stats_cmd->add_option("--sources", s_sources, "Source subset (default: common to all tasks)");
  stats_cmd->add_flag("--low-resource-only", s_low_resource,
                      "Restrict source ranking to low-resource targets");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Hierarchical clustering of a score matrix");
  fs::path c_scores, c_out;
  std::string c_task, c_axis = "rows", c_svg;
  cluster->add_option("--scores", c_scores, "scores.v1 file")->required();
  cluster->add_option("--task", c_task, "Task id within the score file")->required();
  cluster->add_option("--axis", c_axis, "rows|columns (default rows)");
  cluster->add_option("--out", c_out, "Output dendrogram file")->required();
  cluster->add_option("--svg", c_svg, "Also render the reordered heat map SVG");

  try {
    app.parse(argc, argv);
    if (features->parsed()) {
      return cmd_features(f_corpus, f_langdefs, f_out, f_max_files, f_seed);
    }
    if (pairs->parsed()) return cmd_pairs(p_hist, p_profiles, p_stats, p_seen, p_out);
    if (train->parsed()) {
      return cmd_train(t_pairs, t_scores, t_task, t_objective, t_flags, t_out);
    }
    if (rank_cmd->parsed()) return cmd_rank(r_model, r_pairs, r_target, r_k, r_out);
    if (evaluate->parsed()) {
      return cmd_evaluate(e_pairs, e_scores, e_task, e_method, e_history, e_flags, e_out);
    }
    if (explain->parsed()) return cmd_explain(x_model, x_pairs, x_task, x_out);
    if (stats_cmd->parsed()) {
      return cmd_stats(s_scores, s_out, s_targets, s_sources, s_low_resource);
    }
    if (cluster->parsed()) return cmd_cluster(c_scores, c_task, c_axis, c_out, c_svg);
    throw UsageError("no subcommand given");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help/version exit 0, any parse error is usage
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
