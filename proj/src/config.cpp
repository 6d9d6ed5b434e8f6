#include "hcm/config.hpp"

#include <fstream>
#include <set>

#include "hcm/errors.hpp"

namespace hcm {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing key \"" + key + "\"");
  return *it;
}

double as_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field + ": expected a number");
  return v.get<double>();
}

std::uint64_t as_u64(const json& v, const std::string& field) {
  if (!v.is_number_unsigned() && !v.is_number_integer()) {
    throw ConfigError(field + ": expected an integer");
  }
  if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
    throw ConfigError(field + ": must be non-negative");
  }
  return v.get<std::uint64_t>();
}

}  // namespace

HcmConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  reject_unknown(doc,
                 {"version", "n_clones", "t_s", "alpha_in", "filter", "eta_dh",
                  "eta_input", "eta_verify", "port_transmissions", "shots", "seed"},
                 "config");
  if (doc.contains("version")) {
    const auto v = as_u64(doc["version"], "version");
    if (v != 1) throw ConfigError("version: only schema version 1 is supported");
  }

  HcmConfig cfg;
  {
    const json& v = require(doc, "n_clones", "config");
    if (!v.is_number_integer()) throw ConfigError("n_clones: expected an integer");
    cfg.n_clones = v.get<int>();
  }
  cfg.t_s = as_number(require(doc, "t_s", "config"), "t_s");

  {
    const json& a = require(doc, "alpha_in", "config");
    if (!a.is_object()) throw ConfigError("alpha_in: expected {re, im}");
    reject_unknown(a, {"re", "im"}, "alpha_in");
    cfg.alpha_in = {as_number(require(a, "re", "alpha_in"), "alpha_in.re"),
                    as_number(require(a, "im", "alpha_in"), "alpha_in.im")};
  }

  {
    const json& f = require(doc, "filter", "config");
    if (!f.is_object()) throw ConfigError("filter: expected an object");
    reject_unknown(f, {"g_prime", "beta", "cutoff_geometry"}, "filter");
    const json& gp = require(f, "g_prime", "filter");
    if (gp.is_string()) {
      if (gp.get<std::string>() != "calibrate") {
        throw ConfigError("filter.g_prime: expected a number or \"calibrate\"");
      }
      cfg.filter.g_prime.reset();
    } else {
      cfg.filter.g_prime = as_number(gp, "filter.g_prime");
    }
    if (f.contains("beta")) cfg.filter.beta = as_number(f["beta"], "filter.beta");
    if (f.contains("cutoff_geometry")) {
      if (!f["cutoff_geometry"].is_string()) {
        throw ConfigError("filter.cutoff_geometry: expected a string");
      }
      try {
        cfg.filter.geometry =
            cutoff_geometry_from_string(f["cutoff_geometry"].get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("filter.cutoff_geometry: ") + e.what());
      }
    }
  }

  if (doc.contains("eta_dh")) cfg.eta_dh = as_number(doc["eta_dh"], "eta_dh");
  if (doc.contains("eta_input")) cfg.eta_input = as_number(doc["eta_input"], "eta_input");
  if (doc.contains("eta_verify")) {
    cfg.eta_verify = as_number(doc["eta_verify"], "eta_verify");
  }
  if (doc.contains("port_transmissions")) {
    const json& ports = doc["port_transmissions"];
    if (!ports.is_array()) throw ConfigError("port_transmissions: expected an array");
    for (const auto& p : ports) {
      cfg.port_transmissions.push_back(as_number(p, "port_transmissions[]"));
    }
  }
  cfg.shots = as_u64(require(doc, "shots", "config"), "shots");
  cfg.seed = as_u64(require(doc, "seed", "config"), "seed");

  cfg.validate();
  return cfg;
}

HcmConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

nlohmann::ordered_json config_to_json(const HcmConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["n_clones"] = cfg.n_clones;
  doc["t_s"] = cfg.t_s;
  doc["alpha_in"] = {{"re", cfg.alpha_in.real()}, {"im", cfg.alpha_in.imag()}};
  nlohmann::ordered_json filt;
  if (cfg.filter.g_prime) {
    filt["g_prime"] = *cfg.filter.g_prime;
  } else {
    filt["g_prime"] = "calibrate";
  }
  filt["beta"] = cfg.filter.beta;
  filt["cutoff_geometry"] = to_string(cfg.filter.geometry);
  doc["filter"] = filt;
  doc["eta_dh"] = cfg.eta_dh;
  doc["eta_input"] = cfg.eta_input;
  doc["eta_verify"] = cfg.eta_verify;
  if (!cfg.port_transmissions.empty()) {
    doc["port_transmissions"] = cfg.port_transmissions;
  }
  doc["shots"] = cfg.shots;
  doc["seed"] = cfg.seed;
  return doc;
}

}  // namespace hcm
