#ifndef XFER_LEXER_HPP_
#define XFER_LEXER_HPP_

#include <array>
#include <bitset>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace xfer::lex {

// Token classes emitted by the data-driven lexer. Every character of the
// input that is not whitespace lands in exactly one of these.
enum class Category : std::uint8_t {
  kName = 0,
  kKeyword,
  kLiteralNumber,
  kLiteralString,
  kOperator,
  kPunctuation,
  kComment,
  kText,
};

inline constexpr int kNumCategories = 8;
std::string_view category_name(Category c);
std::optional<Category> category_from_name(std::string_view name);

// Vocabulary keys are capped at this length; longer runs are emitted as
// consecutive chunks so that token concatenation still rebuilds the input.
inline constexpr size_t kMaxTokenLength = 512;

// Character-class over single bytes, built from a spec string where
// "X-Y" denotes an inclusive range and any other byte is literal
// (e.g. "a-zA-Z_" or "0-9").
class CharClass {
 public:
  CharClass() = default;
  static CharClass from_spec(std::string_view spec);
  std::string to_spec() const { return spec_; }
  bool contains(char c) const { return bits_[static_cast<unsigned char>(c)]; }
  bool empty() const { return bits_.none(); }
  bool intersects(const CharClass& other) const { return (bits_ & other.bits_).any(); }

 private:
  std::bitset<256> bits_;
  std::string spec_;
};

struct StringRule {
  std::string open;
  std::string close;
  std::optional<char> escape;
};

struct NumberRule {
  bool decimal = true;
  bool hex = false;
  bool floating = false;
};

// Declarative per-language token definition (langdef.v1 document).
struct TokenDefinition {
  std::string language;
  std::vector<std::string> extensions;
  bool case_insensitive = false;
  std::set<std::string> keywords;
  std::vector<std::string> line_comments;
  std::vector<std::pair<std::string, std::string>> block_comments;
  std::vector<StringRule> strings;
  CharClass id_start;
  CharClass id_continue;
  NumberRule numbers;
  CharClass operator_chars;
  CharClass punctuation_chars;

  // Throws DataError if the definition violates its invariants
  // (empty keyword set, overlapping operator/punctuation classes).
  void validate() const;
};

struct Token {
  Category category;
  std::string text;
  size_t offset = 0;
};

struct Diagnostic {
  std::string message;
  size_t offset = 0;
  std::string file;
};

struct TokenizeResult {
  std::vector<Token> tokens;
  std::vector<Diagnostic> diagnostics;
};

// Scans `text` with the longest-match rule order: line comments, block
// comments, strings, numbers, identifiers, operator runs, punctuation,
// then a text fallback. Unterminated strings/comments become `text`
// tokens to end of input plus a diagnostic; the scan never hard-fails.
TokenizeResult tokenize(std::string_view text, const TokenDefinition& def);

TokenDefinition load_langdef(const std::filesystem::path& path);
void save_langdef(const TokenDefinition& def, const std::filesystem::path& path);

}  // namespace xfer::lex

#endif  // XFER_LEXER_HPP_
