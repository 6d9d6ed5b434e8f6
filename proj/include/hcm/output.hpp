#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hcm/engine.hpp"
#include "json.hpp"

namespace hcm {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(const std::string& bytes);

// Assembles the stats document. Top-level keys are fixed:
// acceptance_rate, shots, clones, gains, analytic.
nlohmann::ordered_json stats_to_json(const ResolvedRun& run, const BatchResult& result);

// Writes files of a run directory and tracks their digests for the manifest.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }

  void write_text(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const nlohmann::ordered_json& doc);

  // manifest.json with the config snapshot and the digests of everything
  // written so far
  void write_manifest(const std::string& command, const nlohmann::ordered_json& config,
                      std::uint64_t seed, int threads,
                      const nlohmann::ordered_json& run_info);

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> digests_;
};

// One CSV table with a fixed column schema; numbers are written with 17
// significant digits so files round-trip bit-exactly.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);

  void add_row(const std::vector<std::string>& cells);
  void add_row_numeric(const std::vector<double>& values);

  static std::string format(double v);
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::string body_;
};

}  // namespace hcm
