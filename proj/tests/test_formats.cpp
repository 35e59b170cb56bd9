#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "test_helpers.hpp"
#include "xfer/boosting.hpp"
#include "xfer/common.hpp"
#include "xfer/features.hpp"
#include "xfer/histogram.hpp"
#include "xfer/lexer.hpp"
#include "xfer/profiles.hpp"
#include "xfer/ranking.hpp"
#include "xfer/score_matrix.hpp"

using namespace xfer;
namespace fs = std::filesystem;

namespace {

fs::path tmp_file(const std::string& name) {
  return fs::temp_directory_path() / name;
}

void write(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace

TEST_CASE("hexfloat round trip is exact") {
  Rng rng(64);
  for (int trial = 0; trial < 2000; ++trial) {
    double v = (rng.unit() * 2 - 1) * std::pow(10.0, static_cast<double>(rng.below(13)) - 6.0);
    CHECK(parse_double(to_hexfloat(v)) == v);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(parse_double(to_hexfloat(0.0)) == 0.0);
}

TEST_CASE("field escaping round trip") {
  Rng rng(65);
  const std::string alphabet = "ab\t\n\r\\\x1f xyz";
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const size_t len = rng.below(20);
    for (size_t i = 0; i < len; ++i) s += alphabet[rng.below(alphabet.size())];
    CHECK(unescape_field(escape_field(s)) == s);
    CHECK(escape_field(s).find('\t') == std::string::npos);
    CHECK(escape_field(s).find('\n') == std::string::npos);
  }
}

TEST_CASE("langdef save and load round trip") {
  auto def = lex::load_langdef(testutil::repo_path("data/langdefs/python.json"));
  auto tmp = tmp_file("xfer_langdef_rt.json");
  lex::save_langdef(def, tmp);
  auto back = lex::load_langdef(tmp);
  CHECK(back.language == def.language);
  CHECK(back.keywords == def.keywords);
  CHECK(back.extensions == def.extensions);
  CHECK(back.line_comments == def.line_comments);
  CHECK(back.strings.size() == def.strings.size());
  fs::remove(tmp);
}

TEST_CASE("langdef version is validated") {
  auto tmp = tmp_file("xfer_langdef_bad.json");
  write(tmp, R"({"format":"langdef.v2","language":"x","keywords":["k"],)"
             R"("identifier":{"start":"a","continue":"a"}})");
  CHECK_THROWS_WITH_AS([&] { lex::load_langdef(tmp); }(),
                       doctest::Contains("langdef.v1"), DataError);
  fs::remove(tmp);
}

TEST_CASE("profile table round trip and validation") {
  auto table = feat::load_profiles(testutil::repo_path("data/profiles.json"));
  CHECK(table.size() == 37);
  auto tmp = tmp_file("xfer_prof_rt.json");
  feat::save_profiles(table, tmp);
  auto back = feat::load_profiles(tmp);
  CHECK(back.size() == table.size());
  CHECK(back.at("haskell").paradigms == table.at("haskell").paradigms);
  CHECK(back.at("bash").paradigms.empty());
  CHECK(*back.at("c").type_strength == feat::TypeStrength::kWeak);
  fs::remove(tmp);

  write(tmp, R"({"format":"langprof.v2","languages":[]})");
  CHECK_THROWS_AS(feat::load_profiles(tmp), DataError);
  fs::remove(tmp);
}

TEST_CASE("tokhist header is validated") {
  CHECK_THROWS_AS(lex::parse_histogram("bogus\tc\t0\n"), DataError);
  CHECK_THROWS_AS(lex::parse_histogram("tokhist.v1\tc\t5\nname\tx\t1\n"), DataError);
  auto ok = lex::parse_histogram("tokhist.v1\tc\t1\nname\tx\t1\n");
  CHECK(ok.total() == 1);
}

TEST_CASE("gbrank format and structure are validated") {
  CHECK_THROWS_AS(gbt::parse_model("{}"), DataError);
  CHECK_THROWS_AS(gbt::parse_model("not json"), DataError);
  // child index out of range
  const std::string bad = R"({"format":"gbrank.v1","objective":"regression",
    "base_score":"0x0p+0","learning_rate":"0x1p-1","feature_names":[],
    "config":{"num_trees":1,"max_leaves":2,"learning_rate":"0x1p-1",
      "min_samples_per_leaf":1,"l2_leaf_reg":"0x0p+0","sigma":"0x1p+0",
      "ndcg_truncation":3,"seed":0},
    "trees":[{"nodes":[{"feature":0,"threshold":"0x1p-1","missing_left":true,
      "left":5,"right":2,"cover":"0x1p+3"}]}]})";
  CHECK_THROWS_AS(gbt::parse_model(bad), DataError);
}

TEST_CASE("scores format tag mismatch is an error") {
  auto tmp = tmp_file("xfer_scores_bad.csv");
  write(tmp, "# scores.v2\ntask,source,target,score\nt,a,b,0.5\n");
  CHECK_THROWS_AS(load_score_matrices(tmp), DataError);
  write(tmp, "task,source,target\nt,a,b\n");
  CHECK_THROWS_AS(load_score_matrices(tmp), DataError);
  write(tmp, "# scores.v1\ntask,source,target,score\nt,a,b,0.5\nt,a,b,0.6\n");
  CHECK_THROWS_WITH_AS([&] { load_score_matrices(tmp); }(),
                       doctest::Contains("duplicate"), DataError);
  fs::remove(tmp);
}

TEST_CASE("featvec header mismatch is an error") {
  auto tmp = tmp_file("xfer_featvec_bad.csv");
  write(tmp, "# featvec.v1\nsource,target,wrong_column\na,b,1\n");
  CHECK_THROWS_AS(feat::load_pair_features(tmp), DataError);
  write(tmp, "# featvec.v2\nsource,target\n");
  CHECK_THROWS_AS(feat::load_pair_features(tmp), DataError);
  fs::remove(tmp);
}

TEST_CASE("plhist malformed lines are rejected") {
  auto tmp = tmp_file("xfer_plhist_bad.txt");
  write(tmp, "edge a b\nvertex c\n");
  CHECK_THROWS_AS(rank::load_history_graph(tmp), DataError);
  write(tmp, "# comment\nedge a b\nalias aa a\n");
  auto graph = rank::load_history_graph(tmp);
  CHECK(graph.canonical("aa") == "a");
  CHECK(graph.nodes.count("b") == 1);
  fs::remove(tmp);
}

TEST_CASE("alias contraction collapses versioned edges") {
  auto tmp = tmp_file("xfer_plhist_alias.txt");
  // edge between two versions of the same language vanishes on contraction
  write(tmp, "alias python2 python\nalias python3 python\n"
             "edge python2 python3\nedge python ruby\n");
  auto graph = rank::load_history_graph(tmp);
  CHECK(graph.nodes.count("python") == 1);
  CHECK(graph.nodes.count("python2") == 0);
  auto dist = graph.bfs_distances("python3");
  CHECK(dist.at("ruby") == 1);
  fs::remove(tmp);
}

TEST_CASE("shipped history graph loads and is contracted") {
  auto graph = rank::load_history_graph(testutil::repo_path("data/history.plhist"));
  CHECK(graph.nodes.count("cpp") == 1);
  CHECK(graph.canonical("c++") == "cpp");
  CHECK(graph.canonical("python3") == "python");
  // kotlin reaches java directly
  CHECK(graph.bfs_distances("kotlin").at("java") == 1);
}
