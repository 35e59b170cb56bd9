#ifndef XFER_HISTOGRAM_HPP_
#define XFER_HISTOGRAM_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xfer/lexer.hpp"

namespace xfer::lex {

// Per-language vocabulary with counts, one map per token category, plus a
// category-bigram vocabulary kept outside the category partition (it is a
// derived view used only by the structural overlap feature).
class TokenHistogram {
 public:
  TokenHistogram() = default;
  explicit TokenHistogram(std::string language) : language_(std::move(language)) {}

  const std::string& language() const { return language_; }
  std::uint64_t total() const { return total_; }

  // Adds token occurrences; the caller applies case folding upstream.
  void add(Category cat, std::string token, std::uint64_t count = 1);
  void add_bigram(Category prev_cat, Category cat, std::string token,
                  std::uint64_t count = 1);

  // Folds a tokenize() result in, including adjacent-token bigrams.
  void accumulate(const std::vector<Token>& tokens, bool lowercase);

  void merge(const TokenHistogram& other);

  const std::map<std::string, std::uint64_t>& category(Category cat) const {
    return categories_[static_cast<size_t>(cat)];
  }
  const std::map<std::string, std::uint64_t>& bigrams() const { return bigrams_; }

  // Key sets used by the overlap features.
  std::vector<std::string> vocabulary(Category cat) const;
  std::vector<std::string> union_vocabulary() const;   // all 8 categories, as "cat\x1ftoken"
  std::vector<std::string> literal_vocabulary() const; // numbers plus strings
  std::vector<std::string> bigram_vocabulary() const;

  // Checks the count partition invariant; throws DataError on violation.
  void check() const;

  bool operator==(const TokenHistogram& other) const = default;

 private:
  std::string language_;
  std::array<std::map<std::string, std::uint64_t>, kNumCategories> categories_;
  std::map<std::string, std::uint64_t> bigrams_;
  std::uint64_t total_ = 0;
};

// tokhist.v1: header "tokhist.v1<TAB>language<TAB>total", then sorted
// "category<TAB>token<TAB>count" lines; bigram rows use category "syntax".
std::string serialize_histogram(const TokenHistogram& hist);
TokenHistogram parse_histogram(const std::string& content);
void save_histogram(const TokenHistogram& hist, const std::filesystem::path& path);
TokenHistogram load_histogram(const std::filesystem::path& path);

struct BuildResult {
  TokenHistogram histogram;
  std::vector<Diagnostic> diagnostics;
  std::vector<std::filesystem::path> files;  // processed, in scan order
};

// Walks corpus_root for files matching the definition's extensions (sorted
// path order), optionally sampling max_files of them with the seeded
// generator, and accumulates one histogram. Throws DataError("empty
// corpus") when nothing readable matches.
BuildResult build_histogram(const std::filesystem::path& corpus_root,
                            const TokenDefinition& def,
                            std::optional<size_t> max_files, std::uint64_t seed);

}  // namespace xfer::lex

#endif  // XFER_HISTOGRAM_HPP_
