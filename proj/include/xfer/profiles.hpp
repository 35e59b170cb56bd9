#ifndef XFER_PROFILES_HPP_
#define XFER_PROFILES_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace xfer::feat {

enum class Paradigm {
  kScripting, kImperative, kStructured, kConcurrent, kArray, kReflective,
  kGeneric, kFunctional, kObjectOriented, kProcedural, kLogic, kEventDriven,
  kDeclarative, kMetaprogramming, kModular, kMacro, kPipeline, kEsoteric,
  kDistributed, kBlockStructured, kDataDriven, kAgentOriented, kCompiled,
  kMultistaged, kProcessOriented, kTaskDriven,
};

enum class TypeStrength { kStrong, kWeak };
enum class TypeExpression { kExplicit, kImplicit, kInferred };
enum class TypeChecking { kStatic, kDynamic };
enum class TypeCompatibility { kNominal, kStructural };
enum class ParameterPassing { kByValue, kByReference, kByName };

std::string_view to_string(Paradigm p);
std::string_view to_string(TypeStrength v);
std::string_view to_string(TypeExpression v);
std::string_view to_string(TypeChecking v);
std::string_view to_string(TypeCompatibility v);
std::string_view to_string(ParameterPassing v);

// One language's row of the linguistic metadata table (langprof.v1).
// Optional fields model blanks in the source table; blanks propagate as
// missing features rather than fabricated values.
struct LanguageProfile {
  std::string language;
  std::set<Paradigm> paradigms;
  std::optional<bool> object_oriented;
  std::optional<bool> standardized;
  std::optional<TypeStrength> type_strength;
  std::optional<bool> type_safety;
  std::optional<TypeExpression> type_expression;
  std::set<TypeCompatibility> type_compatibility;  // empty when blank
  std::optional<TypeChecking> type_checking;
  std::set<ParameterPassing> parameter_passing;    // empty when blank
  std::optional<bool> garbage_collection;
};

using ProfileTable = std::map<std::string, LanguageProfile>;

ProfileTable load_profiles(const std::filesystem::path& path);
void save_profiles(const ProfileTable& table, const std::filesystem::path& path);

// Per-language dataset statistics (dstats.v1 CSV). Missing cells stay
// unset and propagate through the dataset features.
struct DatasetStats {
  std::string language;
  std::optional<double> difficulty;
  std::optional<double> length;
  std::optional<double> time_limit;
  std::optional<double> memory_limit;
};

using DatasetStatsTable = std::map<std::string, DatasetStats>;

DatasetStatsTable load_dataset_stats(const std::filesystem::path& path);

}  // namespace xfer::feat

#endif  // XFER_PROFILES_HPP_
