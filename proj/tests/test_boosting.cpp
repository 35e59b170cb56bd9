#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <limits>

#include "synth.hpp"
#include "xfer/ranking.hpp"
#include "test_helpers.hpp"
#include "xfer/boosting.hpp"
#include "xfer/common.hpp"

using namespace xfer;
using gbt::DataMatrix;
using gbt::TrainConfig;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

DataMatrix matrix_from(const std::vector<std::vector<double>>& rows) {
  DataMatrix x(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < rows[r].size(); ++c) x.at(r, c) = rows[r][c];
  }
  return x;
}

}  // namespace

TEST_CASE("constant targets give a single zero leaf") {
  DataMatrix x = matrix_from({{0.1}, {0.4}, {0.9}});
  std::vector<double> g = {0.0, 0.0, 0.0};;
  std::vector<double> h = {1.0, 1.0, 1.0};
  TrainConfig cfg;
  gbt::Tree tree = gbt::fit_tree(g, h, x, cfg);
  CHECK(tree.num_leaves() == 1);
  CHECK(tree.value[0] == 0.0);
  CHECK(tree.cover[0] == 3.0);
}

TEST_CASE("step function splits at the straddling midpoint") {
  // y steps at x=0.5; residuals from base 0.6 are 0.6 (y=0) and -0.4 (y=1)
  std::vector<std::vector<double>> rows;
  std::vector<double> g, h;
  for (int i = 1; i <= 10; ++i) {
    const double x = i / 10.0;
    rows.push_back({x});
    const double y = x < 0.5 ? 0.0 : 1.0;
    g.push_back(0.6 - y);
    h.push_back(1.0);
  }
  TrainConfig cfg;
  cfg.max_leaves = 2;
  gbt::Tree tree = gbt::fit_tree(g, h, matrix_from(rows), cfg);
  REQUIRE(tree.num_leaves() == 2);
  CHECK(tree.feature[0] == 0);
  CHECK(tree.threshold[0] == doctest::Approx(0.45).epsilon(1e-12));
  // leaf values are -G/H: left -0.6 (4 rows), right +0.4 (6 rows)
  const int left = tree.left[0];
  const int right = tree.right[0];
  CHECK(tree.value[static_cast<size_t>(left)] == doctest::Approx(-0.6).epsilon(1e-12));
  CHECK(tree.value[static_cast<size_t>(right)] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(tree.cover[static_cast<size_t>(left)] == 4.0);
  CHECK(tree.cover[static_cast<size_t>(right)] == 6.0);
}

TEST_CASE("root split picks the informative feature") {
  // feature 0 separates the gradients, feature 1 is constant-ish noise
  std::vector<std::vector<double>> rows = {
      {0.0, 0.3}, {0.1, 0.3}, {0.2, 0.3}, {0.8, 0.3}, {0.9, 0.3}, {1.0, 0.3}};
  std::vector<double> g = {1.0, 1.0, 1.0, -1.0, -1.0, -1.0};
  std::vector<double> h(6, 1.0);
  TrainConfig cfg;
  cfg.max_leaves = 2;
  gbt::Tree tree = gbt::fit_tree(g, h, matrix_from(rows), cfg);
  CHECK(tree.feature[0] == 0);
}

TEST_CASE("gain ties break to lower feature index and threshold") {
  // duplicate feature: identical columns, identical candidate gains
  std::vector<std::vector<double>> rows = {{0.0, 0.0}, {1.0, 1.0}};
  std::vector<double> g = {1.0, -1.0};
  std::vector<double> h = {1.0, 1.0};
  TrainConfig cfg;
  cfg.max_leaves = 2;
  gbt::Tree tree = gbt::fit_tree(g, h, matrix_from(rows), cfg);
  CHECK(tree.feature[0] == 0);
}

TEST_CASE("leaf count never exceeds max leaves") {
  Rng rng(5);
  std::vector<std::vector<double>> rows;
  std::vector<double> g, h;
  for (int i = 0; i < 200; ++i) {
    rows.push_back({rng.unit(), rng.unit(), rng.unit()});
    g.push_back(rng.unit() - 0.5);
    h.push_back(1.0);
  }
  for (int max_leaves : {2, 3, 16, 64}) {
    TrainConfig cfg;
    cfg.max_leaves = max_leaves;
    gbt::Tree tree = gbt::fit_tree(g, h, matrix_from(rows), cfg);
    CHECK(tree.num_leaves() <= max_leaves);
  }
}

TEST_CASE("config invariants are enforced") {
  DataMatrix x = matrix_from({{0.0}, {1.0}});
  std::vector<double> y = {0.0, 1.0};
  TrainConfig cfg;
  cfg.num_trees = 0;
  CHECK_THROWS_AS(gbt::train_regression(x, y, cfg), DataError);
  cfg = TrainConfig{};
  cfg.max_leaves = 1;
  CHECK_THROWS_AS(gbt::train_regression(x, y, cfg), DataError);
  cfg = TrainConfig{};
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(gbt::train_regression(x, y, cfg), DataError);
}

TEST_CASE("single row trains to an exact constant") {
  DataMatrix x = matrix_from({{0.7, 0.1}});
  std::vector<double> y = {2.5};
  TrainConfig cfg;
  cfg.num_trees = 5;
  gbt::Ensemble model = gbt::train_regression(x, y, cfg);
  CHECK(model.base_score == 2.5);
  CHECK(model.predict(x.row(0)) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("nan target is rejected") {
  DataMatrix x = matrix_from({{0.0}, {1.0}});
  std::vector<double> y = {1.0, kNaN};
  CHECK_THROWS_AS(gbt::train_regression(x, y, TrainConfig{}), DataError);
}

TEST_CASE("training loss is monotone for regression") {
  Rng rng(17);
  const size_t n = 200;
  DataMatrix x(n, 2);
  std::vector<double> y(n);
  for (size_t r = 0; r < n; ++r) {
    x.at(r, 0) = rng.unit();
    x.at(r, 1) = rng.unit();
    y[r] = std::sin(6.0 * x.at(r, 0)) + 0.5 * x.at(r, 1);
  }
  TrainConfig cfg;
  cfg.num_trees = 40;
  cfg.learning_rate = 0.3;
  gbt::Ensemble model = gbt::train_regression(x, y, cfg);

  // replay the boosting path and check per-round squared loss
  std::vector<double> pred(n, model.base_score);
  double prev = std::numeric_limits<double>::infinity();
  for (const gbt::Tree& tree : model.trees) {
    for (size_t r = 0; r < n; ++r) pred[r] += cfg.learning_rate * tree.predict(x.row(r));
    double loss = 0;
    for (size_t r = 0; r < n; ++r) loss += (pred[r] - y[r]) * (pred[r] - y[r]);
    CHECK(loss <= prev + 1e-9);
    prev = loss;
  }
}

TEST_CASE("regression recovers a linear function (held-out mse)") {
  Rng rng(99);
  auto gen = [&](size_t n, DataMatrix* x, std::vector<double>* y) {
    *x = DataMatrix(n, 2);
    y->resize(n);
    for (size_t r = 0; r < n; ++r) {
      x->at(r, 0) = rng.unit();
      x->at(r, 1) = rng.unit();
      (*y)[r] = 3.0 * x->at(r, 0) - 2.0 * x->at(r, 1) + 0.01 * testutil::gaussian(rng);
    }
  };
  DataMatrix xtrain, xtest;
  std::vector<double> ytrain, ytest;
  gen(1000, &xtrain, &ytrain);
  gen(400, &xtest, &ytest);

  TrainConfig cfg;  // reference defaults: 100 trees, 16 leaves, lr 0.1
  gbt::Ensemble model = gbt::train_regression(xtrain, ytrain, cfg);

  double mse = 0, mean = 0;
  for (double v : ytest) mean += v;
  mean /= static_cast<double>(ytest.size());
  double var = 0;
  for (size_t r = 0; r < ytest.size(); ++r) {
    const double err = model.predict(xtest.row(r)) - ytest[r];
    mse += err * err;
    var += (ytest[r] - mean) * (ytest[r] - mean);
  }
  mse /= static_cast<double>(ytest.size());
  var /= static_cast<double>(ytest.size());
  CHECK(mse <= 0.01 * var);
}

TEST_CASE("lambdas at equal scores use rho one half") {
  std::vector<int> grades = {1, 0};
  std::vector<double> scores = {0.0, 0.0};
  std::vector<double> g(2), h(2);
  TrainConfig cfg;
  gbt::compute_lambdas(grades, scores, cfg, g, h);
  // single pair at rho = 1/2; |delta NDCG| = (1-1/log2(3))/idcg with
  // idcg = 1, i.e. 0.36907024642854251
  const double delta = 1.0 - 1.0 / std::log2(3.0);
  CHECK(g[0] == doctest::Approx(-0.5 * delta).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.5 * delta).epsilon(1e-12));
  CHECK(h[0] == doctest::Approx(0.25 * delta).epsilon(1e-12));
  CHECK(h[1] == doctest::Approx(0.25 * delta).epsilon(1e-12));
}

TEST_CASE("uniform grades produce zero lambdas") {
  std::vector<int> grades = {2, 2, 2};
  std::vector<double> scores = {0.3, 0.1, 0.9};
  std::vector<double> g(3), h(3);
  gbt::compute_lambdas(grades, scores, TrainConfig{}, g, h);
  for (double v : g) CHECK(v == 0.0);
  for (double v : h) CHECK(v == 0.0);
}

// Independent scalar oracle: enumerates pairs and computes |delta NDCG|
// by literally swapping the two items in the predicted order and
// re-evaluating DCG@k, rather than via the discount-difference shortcut.
namespace oracle {

double dcg_at_k(const std::vector<int>& order, const std::vector<int>& grades, int k) {
  double dcg = 0;
  for (size_t p = 0; p < order.size() && p < static_cast<size_t>(k); ++p) {
    dcg += (std::pow(2.0, grades[static_cast<size_t>(order[p])]) - 1.0) /
           std::log2(static_cast<double>(p) + 2.0);
  }
  return dcg;
}

void lambdas(const std::vector<int>& grades, const std::vector<double>& scores,
             double sigma, int k, std::vector<double>* g, std::vector<double>* h) {
  const size_t n = grades.size();
  g->assign(n, 0.0);
  h->assign(n, 0.0);
  std::vector<int> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[static_cast<size_t>(a)] != scores[static_cast<size_t>(b)]) {
      return scores[static_cast<size_t>(a)] > scores[static_cast<size_t>(b)];
    }
    return a < b;
  });
  std::vector<int> ideal(grades);
  std::sort(ideal.begin(), ideal.end(), std::greater<int>());
  std::vector<int> ideal_order(n);
  for (size_t i = 0; i < n; ++i) ideal_order[i] = static_cast<int>(i);
  double idcg = 0;
  for (size_t p = 0; p < n && p < static_cast<size_t>(k); ++p) {
    idcg += (std::pow(2.0, ideal[p]) - 1.0) / std::log2(static_cast<double>(p) + 2.0);
  }
  if (idcg <= 0) return;
  std::vector<int> pos(n);
  for (size_t p = 0; p < n; ++p) pos[static_cast<size_t>(order[p])] = static_cast<int>(p);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (grades[i] <= grades[j]) continue;
      std::vector<int> swapped = order;
      std::swap(swapped[static_cast<size_t>(pos[i])], swapped[static_cast<size_t>(pos[j])]);
      const double delta =
          std::abs(dcg_at_k(swapped, grades, k) - dcg_at_k(order, grades, k)) / idcg;
      const double rho = 1.0 / (1.0 + std::exp(sigma * (scores[i] - scores[j])));
      (*g)[i] += -sigma * rho * delta;
      (*g)[j] -= -sigma * rho * delta;
      (*h)[i] += sigma * sigma * rho * (1.0 - rho) * delta;
      (*h)[j] += sigma * sigma * rho * (1.0 - rho) * delta;
    }
  }
}

}  // namespace oracle

TEST_CASE("three document lambda oracle") {
  std::vector<int> grades = {2, 1, 0};
  std::vector<double> scores = {0.0, 0.0, 0.0};
  std::vector<double> g(3), h(3), og, oh;
  TrainConfig cfg;
  gbt::compute_lambdas(grades, scores, cfg, g, h);
  oracle::lambdas(grades, scores, cfg.sigma, cfg.ndcg_truncation, &og, &oh);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(g[i] == doctest::Approx(og[i]).epsilon(1e-12));
    CHECK(h[i] == doctest::Approx(oh[i]).epsilon(1e-12));
  }
  // hand enumeration: idcg = 3 + 1/log2(3), rho = 1/2 for every pair
  CHECK(g[0] == doctest::Approx(-0.3082048737868866).epsilon(1e-9));
  CHECK(g[1] == doctest::Approx(0.0836164261630733).epsilon(1e-9));
  CHECK(g[2] == doctest::Approx(0.2245884476238133).epsilon(1e-9));
  CHECK(h[0] == doctest::Approx(0.1541024368934433).epsilon(1e-9));
}

TEST_CASE("lambda oracle agreement over random groups") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const size_t n = 2 + rng.below(6);
    std::vector<int> grades(n);
    std::vector<double> scores(n);
    for (size_t i = 0; i < n; ++i) {
      grades[i] = static_cast<int>(rng.below(4));
      scores[i] = rng.unit() * 4 - 2;
    }
    TrainConfig cfg;
    cfg.sigma = 0.5 + rng.unit() * 2.0;
    cfg.ndcg_truncation = 1 + static_cast<int>(rng.below(4));
    std::vector<double> g(n), h(n), og, oh;
    gbt::compute_lambdas(grades, scores, cfg, g, h);
    oracle::lambdas(grades, scores, cfg.sigma, cfg.ndcg_truncation, &og, &oh);
    for (size_t i = 0; i < n; ++i) {
      REQUIRE(g[i] == doctest::Approx(og[i]).epsilon(1e-10));
      REQUIRE(h[i] == doctest::Approx(oh[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("pairwise logistic gradient matches finite differences") {
  Rng rng(77);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double si = rng.unit() * 6 - 3;
    const double sj = rng.unit() * 6 - 3;
    const double sigma = 0.25 + rng.unit() * 3.75;
    // pair loss for grade_i > grade_j
    auto loss = [&](double a, double b) {
      return std::log1p(std::exp(-sigma * (a - b)));
    };
    const double eps = 1e-5;
    const double fd = (loss(si + eps, sj) - loss(si - eps, sj)) / (2 * eps);
    const double rho = 1.0 / (1.0 + std::exp(sigma * (si - sj)));
    const double analytic = -sigma * rho;
    REQUIRE(std::abs(fd - analytic) < 1e-6);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("two row group learns the preference") {
  gbt::QueryGroup group;
  group.query_id = "t";
  group.rows = {{1.0, 0.0}, {0.0, 1.0}};
  group.grades = {1, 0};
  TrainConfig cfg;
  cfg.num_trees = 20;
  gbt::Ensemble model = gbt::train_lambdarank({group}, cfg);
  CHECK(model.base_score == 0.0);
  CHECK(model.predict(group.rows[0]) > model.predict(group.rows[1]));
}

TEST_CASE("all-uniform groups are rejected") {
  gbt::QueryGroup group;
  group.query_id = "t";
  group.rows = {{1.0}, {0.0}};
  group.grades = {1, 1};
  CHECK_THROWS_WITH_AS([&] { gbt::train_lambdarank({group}, TrainConfig{}); }(),
                       doctest::Contains("no ranking signal"), DataError);
}

TEST_CASE("lambdarank learns the synthetic benchmark") {
  auto bench = testutil::make_rank_bench(1234, 20, 5, 6, 4);
  TrainConfig cfg = testutil::bench_config();
  gbt::Ensemble model = gbt::train_lambdarank(bench.train, cfg);

  const double ndcg = testutil::mean_test_ndcg(model, bench.test, 3);
  CHECK(ndcg == doctest::Approx(1.0).epsilon(1e-9));

  // within the evaluated cutoff the ordering matches the grade ordering;
  // pairs entirely beyond the truncation carry no training weight
  const size_t k = static_cast<size_t>(cfg.ndcg_truncation);
  for (const auto& group : bench.test) {
    auto order = testutil::predicted_order(model, group);
    for (size_t p = 0; p + 1 < k; ++p) {
      CHECK(group.grades[static_cast<size_t>(order[p])] >=
            group.grades[static_cast<size_t>(order[p + 1])]);
    }
    for (size_t p = k; p < order.size(); ++p) {
      CHECK(group.grades[static_cast<size_t>(order[k - 1])] >=
            group.grades[static_cast<size_t>(order[p])]);
    }
  }
}

namespace {

double kendall_tau(const std::vector<int>& a, const std::vector<int>& b) {
  const size_t n = a.size();
  std::vector<int> pa(n), pb(n);
  for (size_t p = 0; p < n; ++p) {
    pa[static_cast<size_t>(a[p])] = static_cast<int>(p);
    pb[static_cast<size_t>(b[p])] = static_cast<int>(p);
  }
  int concordant = 0, discordant = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const bool x = pa[i] < pa[j];
      const bool y = pb[i] < pb[j];
      (x == y ? concordant : discordant)++;
    }
  }
  return static_cast<double>(concordant - discordant) /
         static_cast<double>(concordant + discordant);
}

}  // namespace

TEST_CASE("inverting grades inverts learned orderings") {
  auto bench = testutil::make_rank_bench(4321, 20, 5, 6, 4);
  TrainConfig cfg = testutil::bench_config();
  gbt::Ensemble model = gbt::train_lambdarank(bench.train, cfg);

  auto inverted = bench;
  for (auto& group : inverted.train) {
    for (int& grade : group.grades) grade = 5 - grade;
  }
  gbt::Ensemble flipped = gbt::train_lambdarank(inverted.train, cfg);

  // the loss concentrates weight at the top of the list, so inversion is
  // asserted as anti-correlation plus a perfectly inverted top block
  double mean_tau = 0;
  for (const auto& group : bench.test) {
    auto order = testutil::predicted_order(model, group);
    auto flipped_order = testutil::predicted_order(flipped, group);
    const double tau = kendall_tau(order, flipped_order);
    CHECK(tau <= -0.15);
    mean_tau += tau;
    auto inv_grades = group.grades;
    for (int& grade : inv_grades) grade = 5 - grade;
    CHECK(rank::ndcg_at_k(flipped_order, inv_grades, 3).value ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(mean_tau / static_cast<double>(bench.test.size()) <= -0.4);
}

TEST_CASE("predict fundamentals") {
  gbt::Ensemble model;
  model.base_score = 1.5;
  model.learning_rate = 0.1;
  SUBCASE("empty ensemble returns base") {
    CHECK(model.predict(std::vector<double>{1.0, 2.0}) == 1.5);
  }
  SUBCASE("single stump routes by threshold and missing flag") {
    gbt::Tree stump;
    stump.feature = {0, -1, -1};
    stump.threshold = {0.5, 0, 0};
    stump.missing_left = {0, 1, 1};
    stump.left = {1, -1, -1};
    stump.right = {2, -1, -1};
    stump.value = {0.0, -1.0, 2.0};
    stump.cover = {10, 5, 5};
    model.trees.push_back(stump);
    CHECK(model.predict(std::vector<double>{0.2}) == doctest::Approx(1.5 + 0.1 * -1.0));
    CHECK(model.predict(std::vector<double>{0.9}) == doctest::Approx(1.5 + 0.1 * 2.0));
    // missing goes right per the flag
    CHECK(model.predict(std::vector<double>{kNaN}) == doctest::Approx(1.5 + 0.1 * 2.0));
  }
  SUBCASE("dimension mismatch errors") {
    model.feature_names = {"a", "b"};
    CHECK_THROWS_AS(model.predict(std::vector<double>{1.0}), DataError);
  }
}

TEST_CASE("prediction is additive over trees") {
  auto bench = testutil::make_rank_bench(9, 4, 1, 5, 3);
  TrainConfig cfg;
  cfg.num_trees = 13;
  gbt::Ensemble model = gbt::train_lambdarank(bench.train, cfg);
  Rng rng(100);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> row = {rng.unit(), rng.unit(), rng.unit()};
    double sum = 0;
    for (const auto& tree : model.trees) sum += tree.predict(row);
    CHECK(model.predict(row) == doctest::Approx(model.base_score +
                                                model.learning_rate * sum)
                                    .epsilon(1e-15));
  }
}

TEST_CASE("model round trip is bit exact") {
  auto bench = testutil::make_rank_bench(55, 6, 1, 6, 4);
  TrainConfig cfg;
  cfg.num_trees = 17;
  cfg.seed = 7;
  gbt::Ensemble model = gbt::train_lambdarank(bench.train, cfg,
                                              {"f0", "f1", "f2", "f3"});
  const std::string doc = gbt::serialize_model(model);
  gbt::Ensemble reloaded = gbt::parse_model(doc);
  CHECK(gbt::serialize_model(reloaded) == doc);

  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> row = {rng.unit(), rng.unit(), rng.unit(), rng.unit()};
    CHECK(model.predict(row) == reloaded.predict(row));  // exact
  }
}

TEST_CASE("training is deterministic") {
  auto bench = testutil::make_rank_bench(2, 8, 1, 5, 3);
  TrainConfig cfg;
  cfg.num_trees = 21;
  gbt::Ensemble a = gbt::train_lambdarank(bench.train, cfg);
  gbt::Ensemble b = gbt::train_lambdarank(bench.train, cfg);
  CHECK(gbt::serialize_model(a) == gbt::serialize_model(b));

  DataMatrix x = matrix_from({{0.1, 0.2}, {0.5, 0.1}, {0.9, 0.8}, {0.3, 0.4}});
  std::vector<double> y = {1.0, 2.0, 3.0, 4.0};
  CHECK(gbt::serialize_model(gbt::train_regression(x, y, cfg)) ==
        gbt::serialize_model(gbt::train_regression(x, y, cfg)));
}

TEST_CASE("missing values route by training-weight majority") {
  // feature 0 present for 6 rows (4 low, 2 high), missing for 2 rows whose
  // gradients match the low side; majority (hessian) side is left
  std::vector<std::vector<double>> rows = {
      {0.1}, {0.2}, {0.3}, {0.4}, {0.8}, {0.9}, {kNaN}, {kNaN}};
  std::vector<double> g = {1, 1, 1, 1, -1, -1, 1, 1};
  std::vector<double> h(8, 1.0);
  TrainConfig cfg;
  cfg.max_leaves = 2;
  gbt::Tree tree = gbt::fit_tree(g, h, matrix_from(rows), cfg);
  REQUIRE(tree.num_leaves() == 2);
  CHECK(tree.missing_left[0] == 1);
  const int left = tree.left[0];
  CHECK(tree.cover[static_cast<size_t>(left)] == 6.0);  // 4 present + 2 missing
  // the missing rows' gradient pulled the left leaf value to -G/H = -1
  CHECK(tree.value[static_cast<size_t>(left)] == doctest::Approx(-1.0));
}
