#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace emotesent {

inline constexpr std::string_view kToolVersion = "1.0.0";

std::string sha256_hex(std::string_view bytes);
/// Throws IoError when the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

/// Provenance record written next to every output.
struct Manifest {
  std::string tool = "emotesent";
  std::string version = std::string(kToolVersion);
  std::string command;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, std::string> inputs;  // path -> sha256
  std::map<std::string, std::string> outputs;  // file name (relative) -> sha256

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& dir, const std::string& name);

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& doc);
};

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

struct ManifestCheck {
  std::vector<std::string> mismatched;
  std::vector<std::string> missing;
  bool ok() const { return mismatched.empty() && missing.empty(); }
};

/// Re-hashes inputs (as recorded) and outputs (relative to `output_dir`).
ManifestCheck verify_manifest(const Manifest& manifest, const std::filesystem::path& output_dir);

}  // namespace emotesent
