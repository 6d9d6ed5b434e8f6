#include "hcm/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "hcm/config.hpp"
#include "hcm/errors.hpp"
#include "hcm/output.hpp"
#include "cli_internal.hpp"

namespace hcm::cli {

namespace {

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const RegimeError*>(&e) ||
      dynamic_cast<const std::invalid_argument*>(&e)) {
    return 2;
  }
  return 1;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

HcmConfig load_with_overrides(const CommonOptions& opt) {
  if (opt.config_path.empty()) throw ConfigError("--config is required");
  HcmConfig cfg = load_config(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.shots) cfg.shots = *opt.shots;
  cfg.validate();
  return cfg;
}

std::string fmt(double v) { return CsvWriter::format(v); }

void write_samples_csv(OutputDir& out, const ResolvedRun& run) {
  const std::uint64_t cap = 2'000'000;
  if (run.cfg.shots > cap) {
    throw std::runtime_error(
        "refusing to write samples.csv for more than 2e6 shots per stream");
  }
  std::vector<std::string> cols = {"stream",   "shot",     "alpha_m_re", "alpha_m_im",
                                   "accepted", "disp_re",  "disp_im"};
  for (int i = 0; i < run.cfg.n_clones; ++i) cols.push_back("clone_" + std::to_string(i));
  CsvWriter csv(cols);
  for (QuadAxis axis : {QuadAxis::kX, QuadAxis::kP}) {
    const char* tag = (axis == QuadAxis::kX) ? "x" : "p";
    for (std::uint64_t s = 0; s < run.cfg.shots; ++s) {
      PhiloxStream rng(run.cfg.seed, s, axis == QuadAxis::kX ? 1 : 2);
      ShotRecord rec = run_shot(run, rng);
      split_and_verify(rec, run, axis, rng);
      std::vector<std::string> cells = {tag,
                                        std::to_string(s),
                                        fmt(rec.alpha_m.real()),
                                        fmt(rec.alpha_m.imag()),
                                        rec.accepted ? "1" : "0"};
      if (rec.accepted) {
        cells.push_back(fmt(rec.displaced_amplitude.real()));
        cells.push_back(fmt(rec.displaced_amplitude.imag()));
        for (double v : rec.clone_samples) cells.push_back(fmt(v));
      } else {
        cells.push_back("");
        cells.push_back("");
        for (int i = 0; i < run.cfg.n_clones; ++i) cells.push_back("");
      }
      csv.add_row(cells);
    }
  }
  out.write_text("samples.csv", csv.str());
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HCM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

int cmd_analytic(const CommonOptions& opt) {
  return guarded([&]() {
    const HcmConfig cfg = load_with_overrides(opt);
    const ResolvedRun run = resolve(cfg);
    const GainSet& g = run.gains;
    const CloneMoments moments = clone_moments_ideal(g, to_quadratures(cfg.alpha_in));
    const RunPrediction pred = predict_run(g, cfg.alpha_in, cfg.eta_dh, run.filter,
                                           cfg.ports_or_uniform().front());

    std::ostringstream report;
    report.precision(9);
    report << "gains:\n"
           << "  g_dla        = " << g.g_dla << "  (g_dla^2 = " << g.g_dla * g.g_dla
           << ")\n"
           << "  g_nla        = " << g.g_nla << "  (g_nla^2 = " << g.g_nla * g.g_nla
           << ")\n"
           << "  g_nla_prime  = " << g.g_nla_prime << "\n"
           << "  g_xp         = " << g.g_xp << "\n"
           << "  g_total      = " << g.g_total << "\n"
           << "filter:\n"
           << "  g_prime      = " << run.filter.g_prime
           << (run.calibrated ? "  (calibrated)\n" : "\n")
           << "  cutoff       = " << run.filter.cutoff << " ("
           << to_string(run.filter.geometry) << ")\n"
           << "clone moments (ideal):\n"
           << "  mean         = (" << moments.mean.x << ", " << moments.mean.p << ")\n"
           << "  variance     = " << moments.variance_x << "\n"
           << "fidelity:\n"
           << "  F_unity      = " << fidelity_unity(cfg.n_clones, cfg.t_s) << "\n"
           << "  F_max        = " << fidelity_max(cfg.n_clones) << "\n"
           << "  F_N          = " << no_cloning_limit(cfg.n_clones) << "\n"
           << "  F_M&P        = 0.5\n"
           << "heralding:\n"
           << "  success_probability = " << pred.acceptance << "\n"
           << "  predicted fidelity  = " << pred.fidelity << "\n";
    std::cout << report.str();

    if (!opt.out_dir.empty()) {
      OutputDir out(opt.out_dir);
      nlohmann::ordered_json doc;
      doc["gains"] = {{"g_dla", g.g_dla},
                      {"g_nla", g.g_nla},
                      {"g_nla_prime", g.g_nla_prime},
                      {"g_xp", g.g_xp},
                      {"g_total", g.g_total}};
      doc["filter"] = {{"g_prime", run.filter.g_prime},
                       {"cutoff", run.filter.cutoff},
                       {"cutoff_geometry", to_string(run.filter.geometry)},
                       {"calibrated", run.calibrated}};
      doc["clone_variance_ideal"] = moments.variance_x;
      doc["fidelity_unity"] = fidelity_unity(cfg.n_clones, cfg.t_s);
      doc["fidelity_max"] = fidelity_max(cfg.n_clones);
      doc["no_cloning_limit"] = no_cloning_limit(cfg.n_clones);
      doc["mp_limit"] = 0.5;
      doc["success_probability"] = pred.acceptance;
      doc["predicted_fidelity"] = pred.fidelity;
      out.write_json("analytic.json", doc);
      out.write_manifest("analytic", config_to_json(cfg), cfg.seed, 1, {});
    }
    return 0;
  });
}

int cmd_simulate(const CommonOptions& opt) {
  return guarded([&]() {
    const HcmConfig cfg = load_with_overrides(opt);
    const int threads = resolve_threads(opt.threads);
    const ResolvedRun run = resolve(cfg);
    const BatchResult res = run_batch(run, threads);

    OutputDir out(opt.out_dir.empty() ? "hcm_results" : opt.out_dir);
    out.write_json("stats.json", stats_to_json(run, res));
    if (opt.write_samples) write_samples_csv(out, run);
    out.write_manifest("simulate", config_to_json(cfg), cfg.seed, threads,
                       run_info_json(run, res));

    std::cout << "acceptance_rate = " << res.acceptance_rate << "\n";
    for (std::size_t i = 0; i < res.fidelity.size(); ++i) {
      std::cout << "clone " << i << ": fidelity = " << res.fidelity[i].value << " +- "
                << res.fidelity[i].std_dev << "\n";
    }
    std::cout << "results in " << out.dir().string() << "\n";
    return 0;
  });
}

int cmd_calibrate(const CommonOptions& opt) {
  return guarded([&]() {
    HcmConfig cfg = load_with_overrides(opt);
    if (cfg.alpha_in.real() == 0.0 && cfg.alpha_in.imag() == 0.0) {
      throw ConfigError("alpha_in: calibration needs a nonzero input mean");
    }
    const std::complex<double> stage =
        std::sqrt(cfg.eta_dh) * std::sqrt(1.0 - cfg.t_s) * cfg.alpha_in;
    const CutoffRule rule{cfg.filter.beta, stage, cfg.filter.geometry};
    const HeraldingFilter filter =
        calibrate_gain(cfg.n_clones, cfg.t_s, cfg.eta_dh, rule, cfg.alpha_in);
    const double acceptance = success_probability(stage, filter);
    const GainSet gains = derive_gains(cfg.n_clones, cfg.t_s);

    std::cout.precision(9);
    std::cout << "g_prime            = " << filter.g_prime << "\n"
              << "g_nla_prime (ideal) = " << gains.g_nla_prime << "\n"
              << "cutoff             = " << filter.cutoff << " ("
              << to_string(filter.geometry) << ")\n"
              << "predicted acceptance = " << acceptance << "\n";

    if (!opt.out_dir.empty()) {
      OutputDir out(opt.out_dir);
      HcmConfig patched = cfg;
      patched.filter.g_prime = filter.g_prime;
      out.write_json("config_calibrated.json", config_to_json(patched));
      nlohmann::ordered_json info;
      info["g_prime"] = filter.g_prime;
      info["cutoff"] = filter.cutoff;
      info["predicted_acceptance"] = acceptance;
      out.write_manifest("calibrate", config_to_json(cfg), cfg.seed, 1, info);
    }
    return 0;
  });
}

int cmd_sweep(const CommonOptions& opt) {
  return guarded([&]() {
    if (opt.sweep_path.empty()) throw ConfigError("sweep: a spec file is required");
    std::ifstream in(opt.sweep_path);
    if (!in) throw ConfigError("cannot open sweep spec: " + opt.sweep_path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("sweep spec parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("sweep spec: expected a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      static const std::set<std::string> allowed{"param", "values", "base"};
      if (!allowed.count(it.key())) {
        throw ConfigError("sweep spec: unknown key \"" + it.key() + "\"");
      }
    }
    if (!doc.contains("param") || !doc["param"].is_string()) {
      throw ConfigError("sweep spec: missing string key \"param\"");
    }
    const std::string param = doc["param"].get<std::string>();
    static const std::set<std::string> params{"t_s", "cutoff_beta", "g_prime", "eta_dh",
                                              "n_clones"};
    if (!params.count(param)) {
      throw ConfigError("sweep spec: param must be one of t_s, cutoff_beta, g_prime, "
                        "eta_dh, n_clones");
    }
    if (!doc.contains("values") || !doc["values"].is_array() || doc["values"].empty()) {
      throw ConfigError("sweep spec: \"values\" must be a non-empty array");
    }
    if (!doc.contains("base")) throw ConfigError("sweep spec: missing \"base\" config");
    HcmConfig base = config_from_json(doc["base"]);
    if (opt.seed) base.seed = *opt.seed;
    if (opt.shots) base.shots = *opt.shots;
    const int threads = resolve_threads(opt.threads);

    CsvWriter csv({"param", "value", "clone", "status", "acceptance_rate", "fidelity",
                   "fidelity_std", "analytic_fidelity", "no_cloning_limit"});
    for (const auto& vj : doc["values"]) {
      const double value = vj.get<double>();
      HcmConfig cfg = base;
      try {
        if (param == "t_s") {
          cfg.t_s = value;
        } else if (param == "cutoff_beta") {
          cfg.filter.beta = value;
        } else if (param == "g_prime") {
          cfg.filter.g_prime = value;
        } else if (param == "eta_dh") {
          cfg.eta_dh = value;
        } else {
          cfg.n_clones = static_cast<int>(value);
          if (!cfg.port_transmissions.empty()) cfg.port_transmissions.clear();
        }
        cfg.validate();
        const ResolvedRun run = resolve(cfg);
        const BatchResult res = run_batch(run, threads);
        const double f_analytic = fidelity_unity(cfg.n_clones, cfg.t_s);
        const double f_n = no_cloning_limit(cfg.n_clones);
        for (std::size_t i = 0; i < res.fidelity.size(); ++i) {
          csv.add_row({param, fmt(value), std::to_string(i), "ok",
                       fmt(res.acceptance_rate), fmt(res.fidelity[i].value),
                       fmt(res.fidelity[i].std_dev), fmt(f_analytic), fmt(f_n)});
        }
      } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& c : msg) {
          if (c == ',' || c == '\n') c = ';';
        }
        csv.add_row({param, fmt(value), "-1", "error: " + msg, "nan", "nan", "nan",
                     "nan", "nan"});
      }
    }

    OutputDir out(opt.out_dir.empty() ? "hcm_results" : opt.out_dir);
    out.write_text("sweep.csv", csv.str());
    nlohmann::ordered_json spec;
    spec["param"] = param;
    spec["values"] = doc["values"];
    spec["base"] = config_to_json(base);
    out.write_manifest("sweep", spec, base.seed, threads, {});
    std::cout << "sweep written to " << (out.dir() / "sweep.csv").string() << "\n";
    return 0;
  });
}

}  // namespace hcm::cli
