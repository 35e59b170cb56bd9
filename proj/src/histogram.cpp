#include "xfer/histogram.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "xfer/common.hpp"

namespace xfer::lex {

namespace {

constexpr char kJoin = '\x1f';
constexpr std::string_view kBigramCategory = "syntax";

std::string bigram_key(Category prev_cat, Category cat, std::string_view token) {
  std::string key;
  key += category_name(prev_cat);
  key += kJoin;
  key += category_name(cat);
  key += kJoin;
  key += token;
  return key;
}

}  // namespace

void TokenHistogram::add(Category cat, std::string token, std::uint64_t count) {
  categories_[static_cast<size_t>(cat)][std::move(token)] += count;
  total_ += count;
}

void TokenHistogram::add_bigram(Category prev_cat, Category cat, std::string token,
                                std::uint64_t count) {
  bigrams_[bigram_key(prev_cat, cat, token)] += count;
}

void TokenHistogram::accumulate(const std::vector<Token>& tokens, bool lowercase) {
  const Token* prev = nullptr;
  for (const Token& tok : tokens) {
    std::string text = lowercase ? lower_ascii(tok.text) : tok.text;
    if (prev != nullptr) {
      add_bigram(prev->category, tok.category, text);
    }
    add(tok.category, std::move(text));
    prev = &tok;
  }
}

void TokenHistogram::merge(const TokenHistogram& other) {
  for (size_t c = 0; c < categories_.size(); ++c) {
    for (const auto& [token, count] : other.categories_[c]) {
      categories_[c][token] += count;
    }
  }
  for (const auto& [key, count] : other.bigrams_) {
    bigrams_[key] += count;
  }
  total_ += other.total_;
}

std::vector<std::string> TokenHistogram::vocabulary(Category cat) const {
  std::vector<std::string> keys;
  keys.reserve(category(cat).size());
  for (const auto& [token, count] : category(cat)) keys.push_back(token);
  return keys;
}

std::vector<std::string> TokenHistogram::union_vocabulary() const {
  std::vector<std::string> keys;
  for (size_t c = 0; c < categories_.size(); ++c) {
    for (const auto& [token, count] : categories_[c]) {
      std::string key;
      key += category_name(static_cast<Category>(c));
      key += kJoin;
      key += token;
      keys.push_back(std::move(key));
    }
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::vector<std::string> TokenHistogram::literal_vocabulary() const {
  std::vector<std::string> keys;
  for (Category cat : {Category::kLiteralNumber, Category::kLiteralString}) {
    for (const auto& [token, count] : category(cat)) keys.push_back(token);
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

std::vector<std::string> TokenHistogram::bigram_vocabulary() const {
  std::vector<std::string> keys;
  keys.reserve(bigrams_.size());
  for (const auto& [key, count] : bigrams_) keys.push_back(key);
  return keys;
}

void TokenHistogram::check() const {
  std::uint64_t sum = 0;
  for (const auto& m : categories_) {
    for (const auto& [token, count] : m) {
      if (count == 0) throw DataError("histogram " + language_ + ": zero count entry");
      sum += count;
    }
  }
  if (sum != total_) {
    throw DataError("histogram " + language_ + ": category counts do not sum to total");
  }
}

std::string serialize_histogram(const TokenHistogram& hist) {
  std::ostringstream out;
  out << "tokhist.v1\t" << hist.language() << "\t" << hist.total() << "\n";
  // rows sorted by (category name, token); maps are already token-sorted,
  // so it is enough to order categories by name and splice bigrams in
  std::vector<Category> cats;
  for (int c = 0; c < kNumCategories; ++c) cats.push_back(static_cast<Category>(c));
  std::sort(cats.begin(), cats.end(), [](Category a, Category b) {
    return category_name(a) < category_name(b);
  });
  bool syntax_written = false;
  auto write_bigrams = [&] {
    for (const auto& [key, count] : hist.bigrams()) {
      out << kBigramCategory << "\t" << escape_field(key) << "\t" << count << "\n";
    }
    syntax_written = true;
  };
  for (Category cat : cats) {
    if (!syntax_written && kBigramCategory < category_name(cat)) write_bigrams();
    for (const auto& [token, count] : hist.category(cat)) {
      out << category_name(cat) << "\t" << escape_field(token) << "\t" << count << "\n";
    }
  }
  if (!syntax_written) write_bigrams();
  return out.str();
}

TokenHistogram parse_histogram(const std::string& content) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) throw DataError("tokhist: empty file");
  auto header = split(line, '\t');
  if (header.size() != 3 || header[0] != "tokhist.v1") {
    throw DataError("tokhist: expected header 'tokhist.v1<TAB>language<TAB>total'");
  }
  TokenHistogram hist(header[1]);
  std::uint64_t declared_total = std::stoull(header[2]);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3) throw DataError("tokhist: malformed row: " + line);
    std::uint64_t count = std::stoull(fields[2]);
    std::string token = unescape_field(fields[1]);
    if (fields[0] == kBigramCategory) {
      auto parts = split(token, kJoin);
      if (parts.size() != 3) throw DataError("tokhist: malformed bigram key");
      auto a = category_from_name(parts[0]);
      auto b = category_from_name(parts[1]);
      if (!a || !b) throw DataError("tokhist: unknown category in bigram key");
      hist.add_bigram(*a, *b, parts[2], count);
      continue;
    }
    auto cat = category_from_name(fields[0]);
    if (!cat) throw DataError("tokhist: unknown category: " + fields[0]);
    hist.add(*cat, token, count);
  }
  if (hist.total() != declared_total) {
    throw DataError("tokhist: declared total " + std::to_string(declared_total) +
                    " does not match rows (" + std::to_string(hist.total()) + ")");
  }
  hist.check();
  return hist;
}

void save_histogram(const TokenHistogram& hist, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write histogram: " + path.string());
  out << serialize_histogram(hist);
}

TokenHistogram load_histogram(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open histogram: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_histogram(buf.str());
}

namespace {

bool extension_matches(const std::filesystem::path& p,
                       const std::vector<std::string>& extensions) {
  std::string ext = lower_ascii(p.extension().string());
  for (const auto& e : extensions) {
    if (ext == lower_ascii(e)) return true;
  }
  return false;
}

}  // namespace

BuildResult build_histogram(const std::filesystem::path& corpus_root,
                            const TokenDefinition& def,
                            std::optional<size_t> max_files, std::uint64_t seed) {
  if (!std::filesystem::exists(corpus_root)) {
    throw DataError("corpus root does not exist: " + corpus_root.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(corpus_root)) {
    if (entry.is_regular_file() && extension_matches(entry.path(), def.extensions)) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.generic_string() < b.generic_string(); });
  if (files.empty()) throw DataError("empty corpus: " + corpus_root.string());

  if (max_files && *max_files < files.size()) {
    // seeded uniform sample without replacement, then back to sorted order
    Rng rng(seed);
    std::vector<size_t> idx(files.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (size_t i = 0; i < *max_files; ++i) {
      size_t j = i + static_cast<size_t>(rng.below(idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(*max_files);
    std::sort(idx.begin(), idx.end());
    std::vector<std::filesystem::path> chosen;
    chosen.reserve(idx.size());
    for (size_t i : idx) chosen.push_back(files[i]);
    files = std::move(chosen);
  }

  BuildResult result;
  result.histogram = TokenHistogram(def.language);
  size_t readable = 0;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
      result.diagnostics.push_back(Diagnostic{"unreadable file, skipped", 0, file.string()});
      continue;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    TokenizeResult toks = tokenize(buf.str(), def);
    for (auto& d : toks.diagnostics) {
      d.file = file.string();
      result.diagnostics.push_back(std::move(d));
    }
    result.histogram.accumulate(toks.tokens, def.case_insensitive);
    result.files.push_back(file);
    ++readable;
  }
  if (readable == 0) throw DataError("empty corpus: no readable files under " + corpus_root.string());
  result.histogram.check();
  return result;
}

}  // namespace xfer::lex
