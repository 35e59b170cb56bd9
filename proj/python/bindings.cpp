// Python bindings for the toolkit's main operations: lexing/histograms,
// pair features, ranking models, attribution, evaluation and analytics.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "xfer/boosting.hpp"
#include "xfer/common.hpp"
#include "xfer/features.hpp"
#include "xfer/histogram.hpp"
#include "xfer/lexer.hpp"
#include "xfer/profiles.hpp"
#include "xfer/ranking.hpp"
#include "xfer/score_matrix.hpp"
#include "xfer/shap.hpp"
#include "xfer/stats.hpp"

namespace py = pybind11;
using namespace xfer;

namespace {

gbt::TrainConfig make_config(int trees, int leaves, double learning_rate,
                             int min_samples, double l2, double sigma, int k,
                             std::uint64_t seed) {
  gbt::TrainConfig cfg;
  cfg.num_trees = trees;
  cfg.max_leaves = leaves;
  cfg.learning_rate = learning_rate;
  cfg.min_samples_per_leaf = min_samples;
  cfg.l2_leaf_reg = l2;
  cfg.sigma = sigma;
  cfg.ndcg_truncation = k;
  cfg.seed = seed;
  return cfg;
}

gbt::DataMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw DataError("empty row set");
  gbt::DataMatrix x(rows.size(), rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != x.cols) throw DataError("ragged row set");
    for (size_t c = 0; c < x.cols; ++c) x.at(r, c) = rows[r][c];
  }
  return x;
}

}  // namespace

PYBIND11_MODULE(xferrank, m) {
  m.doc() = "cross-lingual transfer source ranking toolkit";
  m.attr("__version__") = std::string(kToolkitVersion);

  py::register_exception<DataError>(m, "DataError");

  // --- lexing ---------------------------------------------------------
  py::class_<lex::TokenDefinition>(m, "TokenDefinition")
      .def_readonly("language", &lex::TokenDefinition::language)
      .def_readonly("extensions", &lex::TokenDefinition::extensions)
      .def_readonly("case_insensitive", &lex::TokenDefinition::case_insensitive);
  m.def("load_langdef", &lex::load_langdef, py::arg("path"));

  py::class_<lex::TokenHistogram>(m, "TokenHistogram")
      .def_property_readonly("language", &lex::TokenHistogram::language)
      .def_property_readonly("total", &lex::TokenHistogram::total)
      .def("count",
           [](const lex::TokenHistogram& h, const std::string& category,
              const std::string& token) -> std::uint64_t {
             auto cat = lex::category_from_name(category);
             if (!cat) throw DataError("unknown category: " + category);
             auto it = h.category(*cat).find(token);
             return it == h.category(*cat).end() ? 0 : it->second;
           },
           py::arg("category"), py::arg("token"))
      .def("vocabulary",
           [](const lex::TokenHistogram& h, const std::string& category) {
             auto cat = lex::category_from_name(category);
             if (!cat) throw DataError("unknown category: " + category);
             return h.vocabulary(*cat);
           },
           py::arg("category"))
      .def("save", &lex::save_histogram, py::arg("path"));

  m.def("tokenize",
        [](const std::string& text, const lex::TokenDefinition& def) {
          std::vector<std::pair<std::string, std::string>> out;
          for (const auto& tok : lex::tokenize(text, def).tokens) {
            out.emplace_back(std::string(lex::category_name(tok.category)), tok.text);
          }
          return out;
        },
        py::arg("text"), py::arg("definition"));
  m.def("build_histogram",
        [](const std::filesystem::path& corpus, const lex::TokenDefinition& def,
           std::optional<size_t> max_files, std::uint64_t seed) {
          return lex::build_histogram(corpus, def, max_files, seed).histogram;
        },
        py::arg("corpus"), py::arg("definition"), py::arg("max_files") = py::none(),
        py::arg("seed") = 0);
  m.def("load_histogram", &lex::load_histogram, py::arg("path"));
  m.def("token_overlap",
        [](const lex::TokenHistogram& a, const lex::TokenHistogram& b,
           const std::string& category) {
          static const std::map<std::string, feat::OverlapCategory> kNames = {
              {"name", feat::OverlapCategory::kName},
              {"text", feat::OverlapCategory::kText},
              {"keyword", feat::OverlapCategory::kKeyword},
              {"literal", feat::OverlapCategory::kLiteral},
              {"punctuation", feat::OverlapCategory::kPunctuation},
              {"operator", feat::OverlapCategory::kOperator},
              {"comment", feat::OverlapCategory::kComment},
              {"syntax", feat::OverlapCategory::kSyntax},
              {"tokens", feat::OverlapCategory::kTokens}};
          auto it = kNames.find(category);
          if (it == kNames.end()) throw DataError("unknown overlap category: " + category);
          return feat::token_overlap(a, b, it->second).value;
        },
        py::arg("a"), py::arg("b"), py::arg("category"));

  // --- features --------------------------------------------------------
  m.def("feature_names", [] {
    return std::vector<std::string>(feat::feature_names().begin(),
                                    feat::feature_names().end());
  });
  m.def("set_overlap",
        [](const std::set<std::string>& a, const std::set<std::string>& b) {
          return feat::set_overlap(a, b);
        },
        py::arg("a"), py::arg("b"));
  m.def("load_pair_features",
        [](const std::filesystem::path& path) {
          py::list out;
          for (const auto& row : feat::load_pair_features(path)) {
            py::dict d;
            d["source"] = row.source;
            d["target"] = row.target;
            d["values"] = row.dense();
            out.append(d);
          }
          return out;
        },
        py::arg("path"));

  // --- boosting --------------------------------------------------------
  py::class_<gbt::Ensemble>(m, "Model")
      .def_property_readonly("objective",
                             [](const gbt::Ensemble& e) {
                               return std::string(gbt::objective_name(e.objective));
                             })
      .def_property_readonly("num_trees",
                             [](const gbt::Ensemble& e) { return e.trees.size(); })
      .def_readonly("feature_names", &gbt::Ensemble::feature_names)
      .def("predict",
           [](const gbt::Ensemble& e, const std::vector<double>& row) {
             return e.predict(row);
           },
           py::arg("row"))
      .def("save", &gbt::save_model, py::arg("path"));

  m.def("train_regression",
        [](const std::vector<std::vector<double>>& rows, const std::vector<double>& y,
           std::vector<std::string> feature_names, int trees, int leaves,
           double learning_rate, int min_samples, double l2, double sigma, int k,
           std::uint64_t seed) {
          return gbt::train_regression(
              to_matrix(rows), y,
              make_config(trees, leaves, learning_rate, min_samples, l2, sigma, k, seed),
              std::move(feature_names));
        },
        py::arg("rows"), py::arg("targets"),
        py::arg("feature_names") = std::vector<std::string>{}, py::arg("trees") = 100,
        py::arg("leaves") = 16, py::arg("learning_rate") = 0.1,
        py::arg("min_samples") = 1, py::arg("l2") = 0.0, py::arg("sigma") = 1.0,
        py::arg("k") = 3, py::arg("seed") = 0);
  m.def("train_lambdarank",
        [](const std::vector<std::pair<std::vector<std::vector<double>>, std::vector<int>>>&
               groups,
           std::vector<std::string> feature_names, int trees, int leaves,
           double learning_rate, int min_samples, double l2, double sigma, int k,
           std::uint64_t seed) {
          std::vector<gbt::QueryGroup> qs;
          for (size_t i = 0; i < groups.size(); ++i) {
            gbt::QueryGroup group;
            group.query_id = "q" + std::to_string(i);
            group.rows = groups[i].first;
            group.grades = groups[i].second;
            qs.push_back(std::move(group));
          }
          return gbt::train_lambdarank(
              qs,
              make_config(trees, leaves, learning_rate, min_samples, l2, sigma, k, seed),
              std::move(feature_names));
        },
        py::arg("groups"), py::arg("feature_names") = std::vector<std::string>{},
        py::arg("trees") = 100, py::arg("leaves") = 16, py::arg("learning_rate") = 0.1,
        py::arg("min_samples") = 1, py::arg("l2") = 0.0, py::arg("sigma") = 1.0,
        py::arg("k") = 3, py::arg("seed") = 0);
  m.def("load_model", &gbt::load_model, py::arg("path"));

  // --- ranking / evaluation --------------------------------------------
  m.def("grade_scores",
        [](const std::vector<double>& raw, int num_grades) {
          return rank::grade_scores(raw, num_grades);
        },
        py::arg("raw"), py::arg("num_grades") = 5);
  m.def("ndcg_at_k",
        [](const std::vector<int>& order, const std::vector<int>& grades, int k) {
          auto r = rank::ndcg_at_k(order, grades, k);
          return py::make_tuple(r.value, r.degenerate);
        },
        py::arg("order"), py::arg("grades"), py::arg("k") = 3);
  m.def("history_rank",
        [](const std::filesystem::path& graph_path, const std::string& target,
           const std::vector<std::string>& candidates, int k) {
          auto graph = rank::load_history_graph(graph_path);
          return rank::history_rank(graph, target, candidates, k).entries;
        },
        py::arg("graph"), py::arg("target"), py::arg("candidates"), py::arg("k") = 3);
  m.def("loo_cv",
        [](const std::filesystem::path& pairs_path,
           const std::filesystem::path& scores_path, const std::string& task,
           const std::string& method, std::optional<std::filesystem::path> history,
           int k, int num_grades, bool include_mono, int trees, int leaves,
           double learning_rate, int min_samples, double l2, double sigma,
           std::uint64_t seed) {
          auto pairs = feat::index_pairs(feat::load_pair_features(pairs_path));
          auto matrices = load_score_matrices(scores_path);
          auto it = matrices.find(task);
          if (it == matrices.end()) throw DataError("unknown task: " + task);
          auto method_enum = rank::method_from_name(method);
          if (!method_enum) throw DataError("unknown method: " + method);
          rank::HistoryGraph graph;
          rank::EvalConfig cfg;
          cfg.method = *method_enum;
          cfg.k = k;
          cfg.num_grades = num_grades;
          cfg.include_mono = include_mono;
          cfg.train = make_config(trees, leaves, learning_rate, min_samples, l2, sigma,
                                  k, seed);
          if (history) {
            graph = rank::load_history_graph(*history);
            cfg.history = &graph;
          }
          auto report = rank::loo_cv(it->second, pairs, cfg);
          py::dict out;
          out["mean"] = report.mean;
          out["stddev"] = report.stddev;
          py::list folds;
          for (const auto& fold : report.folds) {
            folds.append(py::make_tuple(fold.target, fold.ndcg, fold.degenerate));
          }
          out["folds"] = folds;
          out["skipped"] = report.skipped;
          return out;
        },
        py::arg("pairs"), py::arg("scores"), py::arg("task"), py::arg("method"),
        py::arg("history") = py::none(), py::arg("k") = 3, py::arg("num_grades") = 5,
        py::arg("include_mono") = false, py::arg("trees") = 100, py::arg("leaves") = 16,
        py::arg("learning_rate") = 0.1, py::arg("min_samples") = 1, py::arg("l2") = 0.0,
        py::arg("sigma") = 1.0, py::arg("seed") = 0);

  // --- attribution -------------------------------------------------------
  m.def("tree_shap",
        [](const gbt::Ensemble& model, const std::vector<double>& row) {
          auto attr = shap::tree_shap(model, row);
          return py::make_tuple(attr.base_value, attr.contributions, attr.prediction);
        },
        py::arg("model"), py::arg("row"));
  m.def("brute_force_shap",
        [](const gbt::Ensemble& model, const std::vector<double>& row) {
          auto attr = shap::brute_force_shap(model, row);
          return py::make_tuple(attr.base_value, attr.contributions, attr.prediction);
        },
        py::arg("model"), py::arg("row"));

  // --- analytics ----------------------------------------------------------
  m.def("summary_scores",
        [](const std::filesystem::path& scores_path, const std::string& task) {
          auto matrices = load_score_matrices(scores_path);
          auto it = matrices.find(task);
          if (it == matrices.end()) throw DataError("unknown task: " + task);
          auto row = stats::summary_scores(it->second);
          py::dict out;
          out["task"] = row.task;
          out["mono"] = row.mono_mean;
          out["cross"] = row.cross_mean;
          out["overall"] = row.overall_mean;
          out["zero_shot"] = row.zero_shot_mean;
          return out;
        },
        py::arg("scores"), py::arg("task"));
  m.def("mean_rank",
        [](const std::vector<double>& ranks) { return stats::mean_rank(ranks); },
        py::arg("ranks"));
  m.def("cluster_leaf_order",
        [](const std::filesystem::path& scores_path, const std::string& task,
           const std::string& axis) {
          auto matrices = load_score_matrices(scores_path);
          auto it = matrices.find(task);
          if (it == matrices.end()) throw DataError("unknown task: " + task);
          auto dendro = stats::hierarchical_cluster(
              it->second, axis == "columns" ? stats::Axis::kColumns : stats::Axis::kRows);
          std::vector<std::string> order;
          for (int leaf : dendro.leaf_order()) {
            order.push_back(dendro.leaf_labels[static_cast<size_t>(leaf)]);
          }
          return py::make_tuple(order, dendro.to_string());
        },
        py::arg("scores"), py::arg("task"), py::arg("axis") = "rows");
}
