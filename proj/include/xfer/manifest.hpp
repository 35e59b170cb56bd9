#ifndef XFER_MANIFEST_HPP_
#define XFER_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace xfer {

// Provenance record written next to every command's outputs. Two runs
// with identical inputs, flags and seed produce byte-identical manifests,
// which makes determinism checkable by file comparison.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> inputs;   // label -> "format:path"
  std::map<std::string, std::string> config;   // flag snapshot
  std::uint64_t seed = 0;
  std::vector<std::filesystem::path> outputs;  // files to checksum

  // Serializes with sorted keys and sha256 of each output, named
  // relative to the manifest's directory.
  void write(const std::filesystem::path& manifest_path) const;
};

}  // namespace xfer

#endif  // XFER_MANIFEST_HPP_
