#ifndef XFER_TESTS_TEST_HELPERS_HPP_
#define XFER_TESTS_TEST_HELPERS_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "xfer/common.hpp"
#include "xfer/lexer.hpp"

namespace testutil {

// Tests run with the repo root as working directory (set by ctest).
inline std::filesystem::path repo_path(const std::string& rel) {
  return std::filesystem::path(rel);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(bool(in), "missing file: ", p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline xfer::lex::TokenDefinition minimal_def() {
  using xfer::lex::CharClass;
  xfer::lex::TokenDefinition def;
  def.language = "mini";
  def.extensions = {".mini"};
  def.keywords = {"if", "else"};
  def.line_comments = {"//"};
  def.block_comments = {{"/*", "*/"}};
  def.strings = {{"\"", "\"", '\\'}};
  def.id_start = CharClass::from_spec("a-zA-Z_");
  def.id_continue = CharClass::from_spec("a-zA-Z0-9_");
  def.numbers = {true, true, true};
  def.operator_chars = CharClass::from_spec("+-*/%=<>!&|^~?:");
  def.punctuation_chars = CharClass::from_spec("()[]{},;.");
  return def;
}

// Frozen per-category counts (lexcounts.v1): "total<TAB>n" then
// "category<TAB>token<TAB>count" rows.
struct FrozenCounts {
  std::uint64_t total = 0;
  std::map<std::string, std::map<std::string, std::uint64_t>> categories;
};

inline FrozenCounts load_counts(const std::filesystem::path& p) {
  FrozenCounts out;
  std::istringstream in(read_file(p));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = xfer::split(line, '\t');
    if (fields.size() == 2 && fields[0] == "total") {
      out.total = std::stoull(fields[1]);
      continue;
    }
    REQUIRE_MESSAGE(fields.size() == 3, "bad counts row: ", line);
    out.categories[fields[0]][xfer::unescape_field(fields[1])] = std::stoull(fields[2]);
  }
  return out;
}

}  // namespace testutil

#endif  // XFER_TESTS_TEST_HELPERS_HPP_
