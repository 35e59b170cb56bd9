#include "xfer/lexer.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "xfer/common.hpp"

namespace xfer::lex {

namespace {

constexpr std::array<std::string_view, kNumCategories> kCategoryNames = {
    "name",          "keyword",  "literal-number", "literal-string",
    "operator",      "punctuation", "comment",     "text"};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_hex_digit(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

}  // namespace

std::string_view category_name(Category c) {
  return kCategoryNames[static_cast<size_t>(c)];
}

std::optional<Category> category_from_name(std::string_view name) {
  for (size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return static_cast<Category>(i);
  }
  return std::nullopt;
}

CharClass CharClass::from_spec(std::string_view spec) {
  CharClass cc;
  cc.spec_ = std::string(spec);
  for (size_t i = 0; i < spec.size(); ++i) {
    if (i + 2 < spec.size() && spec[i + 1] == '-' &&
        static_cast<unsigned char>(spec[i]) <= static_cast<unsigned char>(spec[i + 2])) {
      for (int c = static_cast<unsigned char>(spec[i]);
           c <= static_cast<unsigned char>(spec[i + 2]); ++c) {
        cc.bits_.set(c);
      }
      i += 2;
    } else {
      cc.bits_.set(static_cast<unsigned char>(spec[i]));
    }
  }
  return cc;
}

void TokenDefinition::validate() const {
  if (language.empty()) throw DataError("langdef: missing language id");
  if (keywords.empty()) {
    throw DataError("langdef " + language + ": keyword set must be nonempty");
  }
  if (operator_chars.intersects(punctuation_chars)) {
    throw DataError("langdef " + language +
                    ": operator and punctuation classes must be disjoint");
  }
  for (const auto& [open, close] : block_comments) {
    if (open.empty() || close.empty()) {
      throw DataError("langdef " + language + ": empty block comment delimiter");
    }
  }
  for (const auto& rule : strings) {
    if (rule.open.empty() || rule.close.empty()) {
      throw DataError("langdef " + language + ": empty string delimiter");
    }
  }
}

namespace {

class Scanner {
 public:
  Scanner(std::string_view text, const TokenDefinition& def)
      : text_(text), def_(def) {
    // longest-first so that e.g. """ wins over " and /** over /*
    line_comments_ = def.line_comments;
    std::sort(line_comments_.begin(), line_comments_.end(),
              [](const auto& a, const auto& b) { return a.size() > b.size(); });
    block_comments_ = def.block_comments;
    std::sort(block_comments_.begin(), block_comments_.end(),
              [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
    strings_ = def.strings;
    std::sort(strings_.begin(), strings_.end(),
              [](const auto& a, const auto& b) { return a.open.size() > b.open.size(); });
  }

  TokenizeResult run() {
    const size_t n = text_.size();
    size_t i = 0;
    while (i < n) {
      const char c = text_[i];
      if (is_space(c)) {
        flush_text(i);
        ++i;
        continue;
      }
      Match m;
      if (match_line_comment(i, &m) || match_block_comment(i, &m) ||
          match_string(i, &m)) {
        flush_text(i);
        if (!m.diagnostic.empty()) diagnose(m.diagnostic, i);
        emit(m.category, i, m.end);
        i = m.end;
      } else if (is_digit(c)) {
        flush_text(i);
        size_t end = scan_number(i);
        emit(Category::kLiteralNumber, i, end);
        i = end;
      } else if (def_.id_start.contains(c)) {
        flush_text(i);
        size_t end = i + 1;
        while (end < n && def_.id_continue.contains(text_[end])) ++end;
        emit_word(i, end);
        i = end;
      } else if (def_.operator_chars.contains(c)) {
        flush_text(i);
        size_t end = i + 1;
        while (end < n && def_.operator_chars.contains(text_[end])) ++end;
        emit(Category::kOperator, i, end);
        i = end;
      } else if (def_.punctuation_chars.contains(c)) {
        flush_text(i);
        emit(Category::kPunctuation, i, i + 1);
        ++i;
      } else {
        if (text_start_ == kNoRun) text_start_ = i;
        ++i;
      }
    }
    flush_text(n);
    return std::move(result_);
  }

 private:
  static constexpr size_t kNoRun = static_cast<size_t>(-1);

  struct Match {
    size_t end = 0;
    Category category = Category::kText;
    std::string diagnostic;
  };

  bool starts_with(size_t pos, std::string_view prefix) const {
    return text_.compare(pos, prefix.size(), prefix) == 0;
  }

  bool match_line_comment(size_t i, Match* m) const {
    for (const auto& prefix : line_comments_) {
      if (starts_with(i, prefix)) {
        size_t e = i;
        while (e < text_.size() && text_[e] != '\n') ++e;
        *m = Match{e, Category::kComment, {}};
        return true;
      }
    }
    return false;
  }

  bool match_block_comment(size_t i, Match* m) const {
    for (const auto& [open, close] : block_comments_) {
      if (!starts_with(i, open)) continue;
      size_t pos = text_.find(close, i + open.size());
      if (pos == std::string_view::npos) {
        *m = Match{text_.size(), Category::kText, "unterminated block comment"};
      } else {
        *m = Match{pos + close.size(), Category::kComment, {}};
      }
      return true;
    }
    return false;
  }

  bool match_string(size_t i, Match* m) const {
    for (const auto& rule : strings_) {
      if (!starts_with(i, rule.open)) continue;
      size_t pos = i + rule.open.size();
      while (pos < text_.size()) {
        if (rule.escape && text_[pos] == *rule.escape && pos + 1 < text_.size()) {
          pos += 2;
          continue;
        }
        if (starts_with(pos, rule.close)) {
          *m = Match{pos + rule.close.size(), Category::kLiteralString, {}};
          return true;
        }
        ++pos;
      }
      *m = Match{text_.size(), Category::kText, "unterminated string literal"};
      return true;
    }
    return false;
  }

  size_t scan_number(size_t i) const {
    const size_t n = text_.size();
    size_t pos = i;
    if (def_.numbers.hex && text_[pos] == '0' && pos + 2 < n &&
        (text_[pos + 1] == 'x' || text_[pos + 1] == 'X') &&
        is_hex_digit(text_[pos + 2])) {
      pos += 2;
      while (pos < n && is_hex_digit(text_[pos])) ++pos;
      return pos;
    }
    while (pos < n && is_digit(text_[pos])) ++pos;
    if (def_.numbers.floating) {
      if (pos < n && text_[pos] == '.' && pos + 1 < n && is_digit(text_[pos + 1])) {
        ++pos;
        while (pos < n && is_digit(text_[pos])) ++pos;
      }
      if (pos < n && (text_[pos] == 'e' || text_[pos] == 'E')) {
        size_t exp = pos + 1;
        if (exp < n && (text_[exp] == '+' || text_[exp] == '-')) ++exp;
        if (exp < n && is_digit(text_[exp])) {
          pos = exp;
          while (pos < n && is_digit(text_[pos])) ++pos;
        }
      }
    }
    return pos;
  }

  void emit_word(size_t begin, size_t end) {
    std::string_view word = text_.substr(begin, end - begin);
    bool is_kw;
    if (def_.case_insensitive) {
      is_kw = def_.keywords.count(lower_ascii(word)) > 0;
    } else {
      is_kw = def_.keywords.count(std::string(word)) > 0;
    }
    emit(is_kw ? Category::kKeyword : Category::kName, begin, end);
  }

  // Emits [begin, end) under `cat`, chunking runs longer than
  // kMaxTokenLength so concatenation still reconstructs the input.
  void emit(Category cat, size_t begin, size_t end) {
    if (end - begin > kMaxTokenLength) {
      diagnose("token longer than 512 characters split into chunks", begin);
    }
    while (begin < end) {
      size_t take = std::min(kMaxTokenLength, end - begin);
      result_.tokens.push_back(
          Token{cat, std::string(text_.substr(begin, take)), begin});
      begin += take;
    }
  }

  void flush_text(size_t upto) {
    if (text_start_ == kNoRun) return;
    emit(Category::kText, text_start_, upto);
    text_start_ = kNoRun;
  }

  void diagnose(std::string message, size_t offset) {
    result_.diagnostics.push_back(Diagnostic{std::move(message), offset, {}});
  }

  std::string_view text_;
  const TokenDefinition& def_;
  std::vector<std::string> line_comments_;
  std::vector<std::pair<std::string, std::string>> block_comments_;
  std::vector<StringRule> strings_;
  TokenizeResult result_;
  size_t text_start_ = kNoRun;
};

}  // namespace

TokenizeResult tokenize(std::string_view text, const TokenDefinition& def) {
  def.validate();
  return Scanner(text, def).run();
}

TokenDefinition load_langdef(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open langdef: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed langdef " + path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "langdef.v1") {
    throw DataError("langdef " + path.string() + ": expected format langdef.v1");
  }
  TokenDefinition def;
  def.language = j.at("language").get<std::string>();
  for (const auto& e : j.value("extensions", nlohmann::json::array())) {
    def.extensions.push_back(e.get<std::string>());
  }
  def.case_insensitive = j.value("case_insensitive", false);
  for (const auto& k : j.at("keywords")) {
    def.keywords.insert(def.case_insensitive ? lower_ascii(k.get<std::string>())
                                             : k.get<std::string>());
  }
  for (const auto& c : j.value("line_comments", nlohmann::json::array())) {
    def.line_comments.push_back(c.get<std::string>());
  }
  for (const auto& c : j.value("block_comments", nlohmann::json::array())) {
    def.block_comments.emplace_back(c.at(0).get<std::string>(), c.at(1).get<std::string>());
  }
  for (const auto& s : j.value("strings", nlohmann::json::array())) {
    StringRule rule;
    rule.open = s.at("open").get<std::string>();
    rule.close = s.at("close").get<std::string>();
    if (s.contains("escape")) {
      std::string esc = s.at("escape").get<std::string>();
      if (esc.size() != 1) throw DataError("langdef: escape must be one character");
      rule.escape = esc[0];
    }
    def.strings.push_back(rule);
  }
  const auto& id = j.at("identifier");
  def.id_start = CharClass::from_spec(id.at("start").get<std::string>());
  def.id_continue = CharClass::from_spec(id.at("continue").get<std::string>());
  if (j.contains("numbers")) {
    const auto& num = j.at("numbers");
    def.numbers.decimal = num.value("decimal", true);
    def.numbers.hex = num.value("hex", false);
    def.numbers.floating = num.value("float", false);
  }
  def.operator_chars = CharClass::from_spec(j.value("operators", ""));
  def.punctuation_chars = CharClass::from_spec(j.value("punctuation", ""));
  def.validate();
  return def;
}

void save_langdef(const TokenDefinition& def, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "langdef.v1";
  j["language"] = def.language;
  j["extensions"] = def.extensions;
  j["case_insensitive"] = def.case_insensitive;
  j["keywords"] = def.keywords;
  j["line_comments"] = def.line_comments;
  auto blocks = nlohmann::json::array();
  for (const auto& [open, close] : def.block_comments) {
    blocks.push_back({open, close});
  }
  j["block_comments"] = blocks;
  auto strings = nlohmann::json::array();
  for (const auto& rule : def.strings) {
    nlohmann::json s;
    s["open"] = rule.open;
    s["close"] = rule.close;
    if (rule.escape) s["escape"] = std::string(1, *rule.escape);
    strings.push_back(s);
  }
  j["strings"] = strings;
  j["identifier"] = {{"start", def.id_start.to_spec()},
                     {"continue", def.id_continue.to_spec()}};
  j["numbers"] = {{"decimal", def.numbers.decimal},
                  {"hex", def.numbers.hex},
                  {"float", def.numbers.floating}};
  j["operators"] = def.operator_chars.to_spec();
  j["punctuation"] = def.punctuation_chars.to_spec();
  std::ofstream out(path);
  if (!out) throw DataError("cannot write langdef: " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace xfer::lex
