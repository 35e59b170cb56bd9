#include "xfer/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "xfer/common.hpp"

namespace xfer::feat {

namespace {

const std::array<std::string, kNumFeatures> kFeatureNames = {
    "ling_eq_object_oriented",
    "ling_eq_type_strength",
    "ling_eq_type_checking",
    "ling_eq_type_safety",
    "ling_eq_garbage_collection",
    "ling_eq_standardized",
    "ling_eq_type_expression",
    "ling_ov_paradigms",
    "ling_ov_type_compatibility",
    "ling_ov_parameter_passing",
    "syn_ov_name",
    "syn_ov_text",
    "syn_ov_keyword",
    "syn_ov_literal",
    "syn_ov_punctuation",
    "syn_ov_operator",
    "syn_ov_comment",
    "syn_ov_syntax",
    "syn_ov_tokens",
    "ds_difficulty_source",
    "ds_difficulty_target",
    "ds_difficulty_reldiff",
    "ds_length_source",
    "ds_length_target",
    "ds_length_reldiff",
    "ds_time_limit_source",
    "ds_time_limit_target",
    "ds_time_limit_reldiff",
    "ds_memory_limit_source",
    "ds_memory_limit_target",
    "ds_memory_limit_reldiff",
    "model_pretrained_source",
    "model_pretrained_target",
    "model_pretrained_both",
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TokenOverlap jaccard_keys(const std::vector<std::string>& a,
                          const std::vector<std::string>& b) {
  TokenOverlap out;
  if (a.empty() && b.empty()) {
    out.value = 1.0;
    out.both_empty = true;
    return out;
  }
  size_t inter = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++inter;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  out.intersection = inter;
  out.value = static_cast<double>(inter) /
              static_cast<double>(a.size() + b.size() - inter);
  return out;
}

std::vector<std::string> overlap_vocabulary(const lex::TokenHistogram& h,
                                            OverlapCategory cat) {
  using lex::Category;
  switch (cat) {
    case OverlapCategory::kName: return h.vocabulary(Category::kName);
    case OverlapCategory::kText: return h.vocabulary(Category::kText);
    case OverlapCategory::kKeyword: return h.vocabulary(Category::kKeyword);
    case OverlapCategory::kLiteral: return h.literal_vocabulary();
    case OverlapCategory::kPunctuation: return h.vocabulary(Category::kPunctuation);
    case OverlapCategory::kOperator: return h.vocabulary(Category::kOperator);
    case OverlapCategory::kComment: return h.vocabulary(Category::kComment);
    case OverlapCategory::kSyntax: return h.bigram_vocabulary();
    case OverlapCategory::kTokens: return h.union_vocabulary();
  }
  return {};
}

}  // namespace

const std::array<std::string, kNumFeatures>& feature_names() { return kFeatureNames; }

int feature_index(std::string_view name) {
  for (int i = 0; i < kNumFeatures; ++i) {
    if (kFeatureNames[i] == name) return i;
  }
  return -1;
}

const std::set<std::string>& default_seen_set() {
  static const std::set<std::string> kSeen = {
      "ruby", "javascript", "go", "python", "java", "php", "c", "csharp"};
  return kSeen;
}

std::vector<double> PairFeatureVector::dense() const {
  std::vector<double> out(values.begin(), values.end());
  for (int i = 0; i < kNumFeatures; ++i) {
    if (missing[i]) out[i] = kNaN;
  }
  return out;
}

TokenOverlap token_overlap(const lex::TokenHistogram& hs, const lex::TokenHistogram& ht,
                           OverlapCategory category) {
  return jaccard_keys(overlap_vocabulary(hs, category), overlap_vocabulary(ht, category));
}

DatasetTriple dataset_triple(std::optional<double> xs, std::optional<double> xt) {
  DatasetTriple t;
  t.source = xs;
  t.target = xt;
  if (xs && xt) {
    double hi = std::max(*xs, *xt);
    t.rel_diff = hi == 0.0 ? 0.0 : std::abs(*xs - *xt) / hi;
  }
  return t;
}

ModelFlags model_flags(const std::string& source, const std::string& target,
                       const std::set<std::string>& seen) {
  double s = seen.count(source) ? 1.0 : 0.0;
  double t = seen.count(target) ? 1.0 : 0.0;
  return ModelFlags{s, t, s * t};
}

PairFeatureVector assemble_pair_features(const AssemblyInputs& in,
                                         const std::string& source,
                                         const std::string& target) {
  if (in.profiles == nullptr) throw DataError("assemble_pair_features: no profile table");
  auto ps = in.profiles->find(source);
  if (ps == in.profiles->end()) throw DataError("unknown language id: " + source);
  auto pt = in.profiles->find(target);
  if (pt == in.profiles->end()) throw DataError("unknown language id: " + target);
  const LanguageProfile& s = ps->second;
  const LanguageProfile& t = pt->second;

  PairFeatureVector v;
  v.source = source;
  v.target = target;
  v.values.fill(kNaN);
  int slot = 0;
  auto put = [&](std::optional<double> x) {
    if (x) {
      v.values[slot] = *x;
    } else {
      v.missing.set(slot);
    }
    ++slot;
  };

  put(equivalence_feature(s.object_oriented, t.object_oriented));
  put(equivalence_feature(s.type_strength, t.type_strength));
  put(equivalence_feature(s.type_checking, t.type_checking));
  put(equivalence_feature(s.type_safety, t.type_safety));
  put(equivalence_feature(s.garbage_collection, t.garbage_collection));
  put(equivalence_feature(s.standardized, t.standardized));
  put(equivalence_feature(s.type_expression, t.type_expression));

  put(set_overlap(s.paradigms, t.paradigms));
  put(set_overlap(s.type_compatibility, t.type_compatibility));
  put(set_overlap(s.parameter_passing, t.parameter_passing));

  const lex::TokenHistogram* hs = nullptr;
  const lex::TokenHistogram* ht = nullptr;
  if (in.histograms != nullptr) {
    auto is = in.histograms->find(source);
    auto it = in.histograms->find(target);
    if (is != in.histograms->end()) hs = &is->second;
    if (it != in.histograms->end()) ht = &it->second;
  }
  for (OverlapCategory cat :
       {OverlapCategory::kName, OverlapCategory::kText, OverlapCategory::kKeyword,
        OverlapCategory::kLiteral, OverlapCategory::kPunctuation,
        OverlapCategory::kOperator, OverlapCategory::kComment,
        OverlapCategory::kSyntax, OverlapCategory::kTokens}) {
    if (hs != nullptr && ht != nullptr) {
      put(token_overlap(*hs, *ht, cat).value);
    } else {
      put(std::nullopt);
    }
  }

  const DatasetStats* ds = nullptr;
  const DatasetStats* dt = nullptr;
  if (in.dataset_stats != nullptr) {
    auto is = in.dataset_stats->find(source);
    auto it = in.dataset_stats->find(target);
    if (is != in.dataset_stats->end()) ds = &is->second;
    if (it != in.dataset_stats->end()) dt = &it->second;
  }
  auto stat = [&](std::optional<double> DatasetStats::* field) {
    DatasetTriple triple = dataset_triple(ds ? ds->*field : std::nullopt,
                                          dt ? dt->*field : std::nullopt);
    put(triple.source);
    put(triple.target);
    put(triple.rel_diff);
  };
  stat(&DatasetStats::difficulty);
  stat(&DatasetStats::length);
  stat(&DatasetStats::time_limit);
  stat(&DatasetStats::memory_limit);

  ModelFlags flags = model_flags(source, target,
                                 in.seen_set != nullptr ? *in.seen_set : default_seen_set());
  put(flags.source_seen);
  put(flags.target_seen);
  put(flags.both_seen);

  return v;
}

void save_pair_features(const std::vector<PairFeatureVector>& rows,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write pair features: " + path.string());
  out << "# featvec.v1\n";
  out << "source,target";
  for (const auto& name : kFeatureNames) out << "," << name;
  out << "\n";
  for (const auto& row : rows) {
    out << row.source << "," << row.target;
    for (int i = 0; i < kNumFeatures; ++i) {
      out << ",";
      if (!row.missing[i]) out << format_double(row.values[i]);
    }
    out << "\n";
  }
}

std::vector<PairFeatureVector> load_pair_features(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pair features: " + path.string());
  std::string line;
  bool header_seen = false;
  std::vector<PairFeatureVector> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto tag = trim(std::string_view(line).substr(1));
      if (!tag.empty() && tag != "featvec.v1") {
        throw DataError("featvec: format mismatch, got '" + std::string(tag) + "'");
      }
      continue;
    }
    auto fields = split(line, ',');
    if (!header_seen) {
      if (fields.size() != kNumFeatures + 2 || fields[0] != "source" || fields[1] != "target") {
        throw DataError("featvec: unexpected header");
      }
      for (int i = 0; i < kNumFeatures; ++i) {
        if (fields[i + 2] != kFeatureNames[i]) {
          throw DataError("featvec: column " + std::to_string(i) + " is '" + fields[i + 2] +
                          "', expected '" + kFeatureNames[i] + "'");
        }
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != kNumFeatures + 2) throw DataError("featvec: malformed row: " + line);
    PairFeatureVector row;
    row.source = fields[0];
    row.target = fields[1];
    row.values.fill(std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < kNumFeatures; ++i) {
      if (trim(fields[i + 2]).empty()) {
        row.missing.set(i);
      } else {
        row.values[i] = parse_double(fields[i + 2]);
      }
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw DataError("featvec: missing header: " + path.string());
  return rows;
}

PairFeatureMap index_pairs(const std::vector<PairFeatureVector>& rows) {
  PairFeatureMap map;
  for (const auto& row : rows) {
    map.emplace(std::make_pair(row.source, row.target), row);
  }
  return map;
}

}  // namespace xfer::feat
