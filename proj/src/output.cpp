#include "hcm/output.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hcm {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr)) {
    throw std::runtime_error("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

nlohmann::ordered_json stats_to_json(const ResolvedRun& run, const BatchResult& result) {
  nlohmann::ordered_json doc;
  doc["acceptance_rate"] = result.acceptance_rate;
  doc["shots"] = result.stats.total_shots;

  nlohmann::ordered_json clones = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < result.stats.clones.size(); ++i) {
    const auto& c = result.stats.clones[i];
    nlohmann::ordered_json entry;
    entry["mean_x"] = c.mean_x;
    entry["mean_p"] = c.mean_p;
    entry["var_x"] = c.var_x;
    entry["var_p"] = c.var_p;
    entry["fidelity"] = result.fidelity[i].value;
    entry["fidelity_std"] = result.fidelity[i].std_dev;
    clones.push_back(entry);
  }
  doc["clones"] = clones;

  const GainSet& g = run.gains;
  nlohmann::ordered_json gains;
  gains["g_dla"] = g.g_dla;
  gains["g_nla"] = g.g_nla;
  gains["g_nla_prime"] = g.g_nla_prime;
  gains["g_xp"] = g.g_xp;
  gains["g_total"] = g.g_total;
  gains["t_s"] = g.t_s;
  gains["n_clones"] = g.n_clones;
  gains["g_prime"] = run.filter.g_prime;
  gains["cutoff"] = run.filter.cutoff;
  gains["cutoff_re"] = run.filter.cutoff_re;
  gains["cutoff_im"] = run.filter.cutoff_im;
  gains["cutoff_geometry"] = to_string(run.filter.geometry);
  gains["calibrated"] = run.calibrated;
  doc["gains"] = gains;

  nlohmann::ordered_json analytic;
  analytic["fidelity_unity"] = fidelity_unity(g.n_clones, g.t_s);
  analytic["fidelity_max"] = fidelity_max(g.n_clones);
  analytic["no_cloning_limit"] = no_cloning_limit(g.n_clones);
  analytic["mp_limit"] = 0.5;
  analytic["clone_variance_ideal"] =
      clone_moments_ideal(g, to_quadratures(run.cfg.alpha_in)).variance_x;
  const RunPrediction pred =
      predict_run(g, run.cfg.alpha_in, run.cfg.eta_dh, run.filter,
                  run.cfg.ports_or_uniform().front());
  analytic["success_probability"] = pred.acceptance;
  analytic["predicted_mean_x"] = pred.mean_x;
  analytic["predicted_mean_p"] = pred.mean_p;
  analytic["predicted_var_x"] = pred.var_x;
  analytic["predicted_var_p"] = pred.var_p;
  analytic["predicted_fidelity"] = pred.fidelity;
  doc["analytic"] = analytic;
  return doc;
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

void OutputDir::write_text(const std::string& name, const std::string& content) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  out.close();
  digests_[name] = sha256_hex(content);
}

void OutputDir::write_json(const std::string& name, const nlohmann::ordered_json& doc) {
  write_text(name, doc.dump(2) + "\n");
}

void OutputDir::write_manifest(const std::string& command,
                               const nlohmann::ordered_json& config, std::uint64_t seed,
                               int threads, const nlohmann::ordered_json& run_info) {
  nlohmann::ordered_json manifest;
  manifest["tool"] = "hcm";
  manifest["tool_version"] = kToolVersion;
  manifest["command"] = command;
  const auto now = std::chrono::system_clock::now();
  manifest["created_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  manifest["seed"] = seed;
  manifest["threads"] = threads;
  manifest["config"] = config;
  if (!run_info.is_null()) manifest["run_info"] = run_info;
  nlohmann::ordered_json outputs;
  for (const auto& [name, digest] : digests_) outputs[name] = "sha256:" + digest;
  manifest["outputs"] = outputs;

  const auto path = dir_ / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << manifest.dump(2) << "\n";
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

std::string CsvWriter::format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) {
    throw std::runtime_error("csv row arity mismatch");
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) body_.push_back(',');
    body_ += cells[i];
  }
  body_.push_back('\n');
}

void CsvWriter::add_row_numeric(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format(v));
  add_row(cells);
}

std::string CsvWriter::str() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out.push_back(',');
    out += columns_[i];
  }
  out.push_back('\n');
  out += body_;
  return out;
}

}  // namespace hcm
