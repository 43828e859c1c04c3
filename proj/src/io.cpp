#include "scencert/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "scencert/errors.hpp"
#include "scencert/parallel.hpp"

namespace scencert {

std::size_t worker_count() {
  if (const char* env = std::getenv("SCENARIO_CERT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return std::size_t(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

std::string CsvTable::to_string() const {
  std::string s;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) s += ',';
    s += header[j];
  }
  s += '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) s += ',';
      s += row[j];
    }
    s += '\n';
  }
  return s;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  atomic_write_text(path, table.to_string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  atomic_write_text(path, j.dump(2) + "\n");
}

nlohmann::json RunManifest::to_json() const {
  return nlohmann::json{{"command", command},
                        {"config", config_path.empty()
                                       ? nlohmann::json(nullptr)
                                       : nlohmann::json(config_path)},
                        {"seed", seed},
                        {"tool_version", kToolVersion},
                        {"outputs", outputs},
                        {"duration_seconds", duration_seconds}};
}

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& m) {
  write_json(out_dir / "manifest.json", m.to_json());
}

}  // namespace scencert
