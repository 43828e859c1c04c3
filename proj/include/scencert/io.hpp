#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace scencert {

inline constexpr const char* kToolVersion = "0.1.0";

// Shortest round-trip decimal form; stable across runs of the same binary.
std::string format_double(double v);

// write-to-temp + rename, so readers never observe partial files
void atomic_write_text(const std::filesystem::path& path, const std::string& text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string to_string() const;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Run manifest written alongside every CLI output; re-running the recorded
// command with the recorded seed reproduces the outputs byte for byte.
struct RunManifest {
  std::string command;
  std::string config_path;  // empty when the command takes no config
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  double duration_seconds = 0.0;

  nlohmann::json to_json() const;
};

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& m);

}  // namespace scencert
