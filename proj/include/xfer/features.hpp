#ifndef XFER_FEATURES_HPP_
#define XFER_FEATURES_HPP_

#include <array>
#include <bitset>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xfer/histogram.hpp"
#include "xfer/profiles.hpp"

namespace xfer::feat {

inline constexpr int kNumFeatures = 34;

// Frozen featvec.v1 column order: 7 linguistic equivalence, 3 linguistic
// overlap, 9 syntactic overlap, 12 dataset, 3 model flags.
const std::array<std::string, kNumFeatures>& feature_names();
int feature_index(std::string_view name);  // -1 when unknown

// The eight pretraining languages of the reference model.
const std::set<std::string>& default_seen_set();

struct PairFeatureVector {
  std::string source;
  std::string target;
  std::array<double, kNumFeatures> values{};  // NaN where missing
  std::bitset<kNumFeatures> missing;

  std::vector<double> dense() const;  // values with NaN for missing slots
};

// 1 when both fields are equal, 0 otherwise; empty optionals yield an
// unset result (missing feature).
template <typename T>
std::optional<double> equivalence_feature(const std::optional<T>& a,
                                          const std::optional<T>& b) {
  if (!a || !b) return std::nullopt;
  return *a == *b ? 1.0 : 0.0;
}

// Jaccard |A∩B| / |A∪B|, defined as 1 when both sets are empty.
template <typename T>
double set_overlap(const std::set<T>& a, const std::set<T>& b) {
  if (a.empty() && b.empty()) return 1.0;
  size_t inter = 0;
  for (const T& x : a) inter += b.count(x);
  size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// Overlap categories of the syntactic feature block.
enum class OverlapCategory {
  kName, kText, kKeyword, kLiteral, kPunctuation, kOperator, kComment,
  kSyntax,   // category-bigram vocabulary, the AST-free structural proxy
  kTokens,   // union of all category vocabularies
};

struct TokenOverlap {
  double value = 1.0;
  bool both_empty = false;       // both-empty convention applied
  std::uint64_t intersection = 0;  // raw count, diagnostics only
};

TokenOverlap token_overlap(const lex::TokenHistogram& hs, const lex::TokenHistogram& ht,
                           OverlapCategory category);

// (source, target, relative difference) for one dataset statistic;
// rd = |xs - xt| / max(xs, xt), 0 when both are 0.
struct DatasetTriple {
  std::optional<double> source;
  std::optional<double> target;
  std::optional<double> rel_diff;
};

DatasetTriple dataset_triple(std::optional<double> xs, std::optional<double> xt);

struct ModelFlags {
  double source_seen;
  double target_seen;
  double both_seen;
};

ModelFlags model_flags(const std::string& source, const std::string& target,
                       const std::set<std::string>& seen);

struct AssemblyInputs {
  const ProfileTable* profiles = nullptr;                           // required
  const std::map<std::string, lex::TokenHistogram>* histograms = nullptr;  // optional
  const DatasetStatsTable* dataset_stats = nullptr;                 // optional
  const std::set<std::string>* seen_set = nullptr;                  // default when null
};

// Fills all 34 slots in the frozen order; unavailable inputs set the
// missing mask instead of fabricating values. Throws DataError for
// language ids absent from the profile table.
PairFeatureVector assemble_pair_features(const AssemblyInputs& in,
                                         const std::string& source,
                                         const std::string& target);

// featvec.v1 table: "# featvec.v1", then header source,target,<names>,
// one row per pair, missing cells empty.
void save_pair_features(const std::vector<PairFeatureVector>& rows,
                        const std::filesystem::path& path);
std::vector<PairFeatureVector> load_pair_features(const std::filesystem::path& path);

using PairFeatureMap = std::map<std::pair<std::string, std::string>, PairFeatureVector>;
PairFeatureMap index_pairs(const std::vector<PairFeatureVector>& rows);

}  // namespace xfer::feat

#endif  // XFER_FEATURES_HPP_
