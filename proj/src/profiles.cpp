#include "xfer/profiles.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "xfer/common.hpp"

namespace xfer::feat {

namespace {

constexpr std::array<std::string_view, 26> kParadigmNames = {
    "scripting", "imperative", "structured", "concurrent", "array",
    "reflective", "generic", "functional", "object-oriented", "procedural",
    "logic", "event-driven", "declarative", "metaprogramming", "modular",
    "macro", "pipeline", "esoteric", "distributed", "block-structured",
    "data-driven", "agent-oriented", "compiled", "multistaged",
    "process-oriented", "task-driven"};

template <typename Enum, size_t N>
Enum enum_from_name(const std::array<std::string_view, N>& names,
                    std::string_view name, std::string_view what) {
  for (size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<Enum>(i);
  }
  throw DataError("langprof: unknown " + std::string(what) + ": " + std::string(name));
}

constexpr std::array<std::string_view, 2> kStrengthNames = {"strong", "weak"};
constexpr std::array<std::string_view, 3> kExpressionNames = {"explicit", "implicit", "inferred"};
constexpr std::array<std::string_view, 2> kCheckingNames = {"static", "dynamic"};
constexpr std::array<std::string_view, 2> kCompatNames = {"nominal", "structural"};
constexpr std::array<std::string_view, 3> kPassingNames = {"by-value", "by-reference", "by-name"};

}  // namespace

std::string_view to_string(Paradigm p) { return kParadigmNames[static_cast<size_t>(p)]; }
std::string_view to_string(TypeStrength v) { return kStrengthNames[static_cast<size_t>(v)]; }
std::string_view to_string(TypeExpression v) { return kExpressionNames[static_cast<size_t>(v)]; }
std::string_view to_string(TypeChecking v) { return kCheckingNames[static_cast<size_t>(v)]; }
std::string_view to_string(TypeCompatibility v) { return kCompatNames[static_cast<size_t>(v)]; }
std::string_view to_string(ParameterPassing v) { return kPassingNames[static_cast<size_t>(v)]; }

ProfileTable load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open profile table: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed langprof " + path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "langprof.v1") {
    throw DataError("langprof " + path.string() + ": expected format langprof.v1");
  }
  ProfileTable table;
  for (const auto& row : j.at("languages")) {
    LanguageProfile p;
    p.language = row.at("language").get<std::string>();
    if (table.count(p.language)) {
      throw DataError("langprof: duplicate language id: " + p.language);
    }
    for (const auto& name : row.value("paradigms", nlohmann::json::array())) {
      p.paradigms.insert(enum_from_name<Paradigm>(kParadigmNames,
                                                  name.get<std::string>(), "paradigm"));
    }
    auto opt_bool = [&](const char* key) -> std::optional<bool> {
      if (!row.contains(key) || row.at(key).is_null()) return std::nullopt;
      return row.at(key).get<bool>();
    };
    p.object_oriented = opt_bool("object_oriented");
    p.standardized = opt_bool("standardized");
    p.type_safety = opt_bool("type_safety");
    p.garbage_collection = opt_bool("garbage_collection");
    if (row.contains("type_strength") && !row.at("type_strength").is_null()) {
      p.type_strength = enum_from_name<TypeStrength>(
          kStrengthNames, row.at("type_strength").get<std::string>(), "type strength");
    }
    if (row.contains("type_expression") && !row.at("type_expression").is_null()) {
      p.type_expression = enum_from_name<TypeExpression>(
          kExpressionNames, row.at("type_expression").get<std::string>(), "type expression");
    }
    if (row.contains("type_checking") && !row.at("type_checking").is_null()) {
      p.type_checking = enum_from_name<TypeChecking>(
          kCheckingNames, row.at("type_checking").get<std::string>(), "type checking");
    }
    for (const auto& name : row.value("type_compatibility", nlohmann::json::array())) {
      p.type_compatibility.insert(enum_from_name<TypeCompatibility>(
          kCompatNames, name.get<std::string>(), "type compatibility"));
    }
    for (const auto& name : row.value("parameter_passing", nlohmann::json::array())) {
      p.parameter_passing.insert(enum_from_name<ParameterPassing>(
          kPassingNames, name.get<std::string>(), "parameter passing"));
    }
    table.emplace(p.language, std::move(p));
  }
  if (table.empty()) throw DataError("langprof: no languages in " + path.string());
  return table;
}

void save_profiles(const ProfileTable& table, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "langprof.v1";
  auto rows = nlohmann::json::array();
  for (const auto& [id, p] : table) {
    nlohmann::json row;
    row["language"] = id;
    auto paradigms = nlohmann::json::array();
    for (Paradigm par : p.paradigms) paradigms.push_back(std::string(to_string(par)));
    row["paradigms"] = paradigms;
    if (p.object_oriented) row["object_oriented"] = *p.object_oriented;
    if (p.standardized) row["standardized"] = *p.standardized;
    if (p.type_safety) row["type_safety"] = *p.type_safety;
    if (p.garbage_collection) row["garbage_collection"] = *p.garbage_collection;
    if (p.type_strength) row["type_strength"] = std::string(to_string(*p.type_strength));
    if (p.type_expression) row["type_expression"] = std::string(to_string(*p.type_expression));
    if (p.type_checking) row["type_checking"] = std::string(to_string(*p.type_checking));
    auto compat = nlohmann::json::array();
    for (TypeCompatibility c : p.type_compatibility) compat.push_back(std::string(to_string(c)));
    row["type_compatibility"] = compat;
    auto passing = nlohmann::json::array();
    for (ParameterPassing pp : p.parameter_passing) passing.push_back(std::string(to_string(pp)));
    row["parameter_passing"] = passing;
    rows.push_back(row);
  }
  j["languages"] = rows;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write profile table: " + path.string());
  out << j.dump(2) << "\n";
}

DatasetStatsTable load_dataset_stats(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset stats: " + path.string());
  DatasetStatsTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, ',');
    if (!header_seen) {
      if (fields.size() != 5 || fields[0] != "language") {
        throw DataError("dstats.v1: expected header language,difficulty,length,time_limit,memory_limit");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 5) throw DataError("dstats.v1: malformed row: " + line);
    DatasetStats s;
    s.language = std::string(trim(fields[0]));
    auto opt = [&](const std::string& f) -> std::optional<double> {
      if (trim(f).empty()) return std::nullopt;
      double v = parse_double(f);
      if (v < 0) throw DataError("dstats.v1: negative value in row: " + line);
      return v;
    };
    s.difficulty = opt(fields[1]);
    s.length = opt(fields[2]);
    s.time_limit = opt(fields[3]);
    s.memory_limit = opt(fields[4]);
    if (table.count(s.language)) throw DataError("dstats.v1: duplicate language: " + s.language);
    table.emplace(s.language, s);
  }
  if (!header_seen) throw DataError("dstats.v1: missing header");
  return table;
}

}  // namespace xfer::feat
