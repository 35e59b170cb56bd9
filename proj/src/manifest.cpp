#include "xfer/manifest.hpp"

#include <fstream>

#include "json.hpp"
#include "xfer/common.hpp"

namespace xfer {

void RunManifest::write(const std::filesystem::path& manifest_path) const {
  nlohmann::json j;
  j["format"] = "manifest.v1";
  j["toolkit_version"] = std::string(kToolkitVersion);
  j["command"] = command;
  j["inputs"] = inputs;
  j["config"] = config;
  j["seed"] = seed;
  nlohmann::json checksums = nlohmann::json::object();
  const auto base = manifest_path.parent_path();
  for (const auto& out : outputs) {
    std::string name = std::filesystem::proximate(out, base).generic_string();
    checksums[name] = sha256_file_hex(out.string());
  }
  j["outputs"] = checksums;
  std::ofstream out(manifest_path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest: " + manifest_path.string());
  out << j.dump(2) << "\n";
}

}  // namespace xfer
