#include <cmath>
#include <iostream>

#include "hcm/cli.hpp"
#include "hcm/config.hpp"
#include "hcm/errors.hpp"
#include "hcm/output.hpp"
#include "cli_internal.hpp"

namespace hcm::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 20260811;

std::string fmt(double v) { return CsvWriter::format(v); }

// Streams the pipeline once and histograms the accepted clone verification
// samples for one quadrature.
std::vector<std::vector<std::uint64_t>> clone_histograms(const ResolvedRun& run,
                                                         QuadAxis axis, double lo,
                                                         double hi, int bins) {
  std::vector<std::vector<std::uint64_t>> counts(
      run.cfg.n_clones, std::vector<std::uint64_t>(bins, 0));
  const double width = (hi - lo) / bins;
  for (std::uint64_t s = 0; s < run.cfg.shots; ++s) {
    PhiloxStream rng(run.cfg.seed, s, axis == QuadAxis::kX ? 1 : 2);
    ShotRecord rec = run_shot(run, rng);
    if (!rec.accepted) continue;
    split_and_verify(rec, run, axis, rng);
    for (int c = 0; c < run.cfg.n_clones; ++c) {
      const double v = rec.clone_samples[c];
      if (v < lo || v >= hi) continue;
      counts[c][static_cast<int>((v - lo) / width)]++;
    }
  }
  return counts;
}

std::string wigner_csv(const GaussianState& state) {
  const auto xs = linspace(state.mean.x - 6.0, state.mean.x + 6.0, 121);
  const auto ps = linspace(state.mean.p - 6.0, state.mean.p + 6.0, 121);
  const WignerGrid grid = wigner(state, xs, ps);
  CsvWriter csv({"x", "p", "w"});
  for (std::size_t i = 0; i < grid.x_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.p_axis.size(); ++j) {
      csv.add_row_numeric({grid.x_axis[i], grid.p_axis[j], grid.at(i, j)});
    }
  }
  return csv.str();
}

int reproduce_fig2(const CommonOptions& opt) {
  HcmConfig cfg;
  cfg.n_clones = 2;
  cfg.t_s = 0.6;
  cfg.alpha_in = {1.115, 1.095};  // (x, p) = (2.23, 2.19)
  cfg.filter.g_prime.reset();     // calibrate for unity gain
  cfg.filter.beta = 3.0;
  cfg.eta_dh = 0.90;
  cfg.shots = 2'000'000;
  cfg.seed = kDefaultSeed;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.shots) cfg.shots = *opt.shots;
  const int threads = resolve_threads(opt.threads);

  const ResolvedRun run = resolve(cfg);
  const BatchResult res = run_batch(run, threads, 100);

  // un-heralded reference: the same machine with the trivial filter
  HcmConfig all_cfg = cfg;
  all_cfg.filter.g_prime = 1.0;
  const ResolvedRun run_all = resolve(all_cfg);

  OutputDir out(opt.out_dir.empty() ? "hcm_results" : opt.out_dir);

  // quadrature histograms before/after heralding
  const double lo = -10.0, hi = 10.0;
  const int bins = 160;
  CsvWriter hist({"quadrature", "clone", "bin_lo", "bin_hi", "count_before",
                  "count_after"});
  for (QuadAxis axis : {QuadAxis::kX, QuadAxis::kP}) {
    const auto before = clone_histograms(run_all, axis, lo, hi, bins);
    const auto after = clone_histograms(run, axis, lo, hi, bins);
    const char* tag = (axis == QuadAxis::kX) ? "x" : "p";
    for (int c = 0; c < cfg.n_clones; ++c) {
      for (int b = 0; b < bins; ++b) {
        hist.add_row({tag, std::to_string(c), fmt(lo + (hi - lo) * b / bins),
                      fmt(lo + (hi - lo) * (b + 1) / bins),
                      std::to_string(before[c][b]), std::to_string(after[c][b])});
      }
    }
  }
  out.write_text("fig2_histograms.csv", hist.str());

  // 1-standard-deviation noise contours
  CsvWriter ell({"label", "mean_x", "mean_p", "sigma_x", "sigma_p"});
  ell.add_row({"input", fmt(2.23), fmt(2.19), fmt(1.0), fmt(1.0)});
  ell.add_row({"mp_clone", fmt(2.23), fmt(2.19), fmt(std::sqrt(3.0)),
               fmt(std::sqrt(3.0))});
  for (int c = 0; c < cfg.n_clones; ++c) {
    const auto& cl = res.stats.clones[c];
    ell.add_row({"hcm_clone_" + std::to_string(c), fmt(cl.mean_x), fmt(cl.mean_p),
                 fmt(std::sqrt(std::max(cl.var_x, 0.0))),
                 fmt(std::sqrt(std::max(cl.var_p, 0.0)))});
  }
  out.write_text("fig2_ellipses.csv", ell.str());

  // bootstrap fidelity distributions
  const GaussianState input = coherent(cfg.alpha_in.real(), cfg.alpha_in.imag());
  CsvWriter fhist({"clone", "fidelity_lo", "fidelity_hi", "probability"});
  nlohmann::ordered_json summary;
  nlohmann::ordered_json clone_summaries = nlohmann::ordered_json::array();
  const double reference_fid[] = {0.698, 0.697};
  for (int c = 0; c < cfg.n_clones; ++c) {
    const BootstrapResult boot = bootstrap_fidelity_distribution(
        res.blocks, c, input, cfg.eta_verify, 2000, cfg.seed + c);
    double fmin = 1.0, fmax = 0.0;
    for (double f : boot.fidelities) {
      fmin = std::min(fmin, f);
      fmax = std::max(fmax, f);
    }
    const int fbins = 40;
    const double span = std::max(fmax - fmin, 1e-6);
    std::vector<std::uint64_t> counts(fbins, 0);
    for (double f : boot.fidelities) {
      int b = static_cast<int>((f - fmin) / span * fbins);
      if (b == fbins) --b;
      counts[b]++;
    }
    for (int b = 0; b < fbins; ++b) {
      fhist.add_row({std::to_string(c), fmt(fmin + span * b / fbins),
                     fmt(fmin + span * (b + 1) / fbins),
                     fmt(static_cast<double>(counts[b]) / boot.fidelities.size())});
    }
    nlohmann::ordered_json cs;
    cs["clone"] = c;
    cs["fidelity"] = res.fidelity[c].value;
    cs["fidelity_std"] = res.fidelity[c].std_dev;
    cs["bootstrap_mean"] = boot.mean;
    cs["bootstrap_std"] = boot.std_dev;
    cs["reference_fidelity"] = reference_fid[c];
    cs["reference_std"] = 0.002;
    cs["mean_x"] = res.stats.clones[c].mean_x;
    cs["mean_p"] = res.stats.clones[c].mean_p;
    clone_summaries.push_back(cs);
  }
  out.write_text("fig2_fidelity_hist.csv", fhist.str());

  // Wigner grids of the input and the reconstructed clone
  out.write_text("fig2_wigner_input.csv", wigner_csv(input));
  GaussianState clone_state;
  clone_state.mean = {res.stats.clones[0].mean_x, res.stats.clones[0].mean_p};
  clone_state.cov = {std::max(res.stats.clones[0].var_x, 1.0), 0.0,
                     std::max(res.stats.clones[0].var_p, 1.0)};
  out.write_text("fig2_wigner_clone.csv", wigner_csv(clone_state));

  summary["input_mean"] = {{"x", 2.23}, {"p", 2.19}};
  summary["acceptance_rate"] = res.acceptance_rate;
  summary["containment"] = res.stats.containment();
  summary["mp_limit"] = 0.5;
  summary["no_cloning_limit"] = no_cloning_limit(2);
  summary["clones"] = clone_summaries;
  out.write_json("summary.json", summary);
  out.write_manifest("reproduce fig2", config_to_json(cfg), cfg.seed, threads,
                     run_info_json(run, res));
  std::cout << "fig2 data written to " << out.dir().string() << "\n";
  return 0;
}

struct OperatingPoint {
  int n;
  double t_s;
  double beta;
};

// per-N settings found by sweeping beta for 5-15% acceptance at eta_dh = 0.9
constexpr OperatingPoint kFig3aPoints[] = {
    {2, 0.600, 2.8}, {3, 0.430, 2.5}, {4, 0.320, 2.7}, {5, 0.323, 2.2}};

HcmConfig fig3_config(const OperatingPoint& pt) {
  HcmConfig cfg;
  cfg.n_clones = pt.n;
  cfg.t_s = pt.t_s;
  cfg.alpha_in = {0.5, 0.0};
  cfg.filter.g_prime.reset();
  cfg.filter.beta = pt.beta;
  cfg.eta_dh = 0.90;
  cfg.shots = 4'000'000;
  cfg.seed = kDefaultSeed;
  return cfg;
}

int reproduce_fig3a(const CommonOptions& opt) {
  const int threads = resolve_threads(opt.threads);
  OutputDir out(opt.out_dir.empty() ? "hcm_results" : opt.out_dir);
  CsvWriter csv({"n", "clone", "fidelity", "fidelity_std", "analytic_fidelity",
                 "no_cloning_limit", "acceptance_rate"});
  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  const double reference[] = {0.695, 0.634, 0.600, 0.618};

  for (const OperatingPoint& pt : kFig3aPoints) {
    HcmConfig cfg = fig3_config(pt);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.shots) cfg.shots = *opt.shots;
    const ResolvedRun run = resolve(cfg);
    const BatchResult res = run_batch(run, threads);
    const RunPrediction pred = predict_run(run.gains, cfg.alpha_in, cfg.eta_dh,
                                           run.filter, 1.0 / pt.n);
    double mean_f = 0.0;
    for (std::size_t c = 0; c < res.fidelity.size(); ++c) {
      csv.add_row_numeric({static_cast<double>(pt.n), static_cast<double>(c),
                           res.fidelity[c].value, res.fidelity[c].std_dev,
                           pred.fidelity, no_cloning_limit(pt.n),
                           res.acceptance_rate});
      mean_f += res.fidelity[c].value;
    }
    mean_f /= res.fidelity.size();
    nlohmann::ordered_json entry;
    entry["n"] = pt.n;
    entry["t_s"] = pt.t_s;
    entry["beta"] = pt.beta;
    entry["mean_fidelity"] = mean_f;
    entry["analytic_fidelity"] = pred.fidelity;
    entry["no_cloning_limit"] = no_cloning_limit(pt.n);
    entry["beats_no_cloning"] = mean_f > no_cloning_limit(pt.n);
    entry["reference_fidelity"] = reference[pt.n - 2];
    entry["acceptance_rate"] = res.acceptance_rate;
    summary.push_back(entry);
  }
  out.write_text("fig3a_fidelity.csv", csv.str());
  nlohmann::ordered_json doc;
  doc["points"] = summary;
  out.write_json("summary.json", doc);
  nlohmann::ordered_json cfgs = nlohmann::ordered_json::array();
  for (const OperatingPoint& pt : kFig3aPoints) cfgs.push_back(config_to_json(fig3_config(pt)));
  out.write_manifest("reproduce fig3a", cfgs, opt.seed.value_or(kDefaultSeed), threads,
                     {});
  std::cout << "fig3a data written to " << out.dir().string() << "\n";
  return 0;
}

int reproduce_fig3b(const CommonOptions& opt) {
  const int threads = resolve_threads(opt.threads);
  OutputDir out(opt.out_dir.empty() ? "hcm_results" : opt.out_dir);
  CsvWriter csv({"n", "t_s", "acceptance_rate", "success_probability_analytic",
                 "fidelity", "fidelity_std", "fidelity_theory", "fidelity_theory_lo",
                 "fidelity_theory_hi", "no_cloning_limit"});

  const std::vector<std::vector<double>> ts_grids = {
      {0.55, 0.60, 0.65, 0.70, 0.75},
      {0.37, 0.40, 0.44, 0.48, 0.52},
      {0.28, 0.30, 0.33, 0.36, 0.39},
      {0.22, 0.25, 0.28, 0.31, 0.34}};

  auto theory = [](int n, double t_s, double eta) {
    const GainSet g = derive_gains(n, t_s);
    return 1.0 / (1.0 + (g.g_dla * g.g_dla - 1.0) / (std::sqrt(eta) * n));
  };

  for (int n = 2; n <= 5; ++n) {
    for (double t_s : ts_grids[n - 2]) {
      HcmConfig cfg;
      cfg.n_clones = n;
      cfg.t_s = t_s;
      cfg.alpha_in = {0.5, 0.0};
      cfg.filter.g_prime.reset();
      cfg.filter.beta = 2.5;
      cfg.eta_dh = 0.90;
      cfg.shots = opt.shots.value_or(1'000'000);
      cfg.seed = opt.seed.value_or(kDefaultSeed);
      const ResolvedRun run = resolve(cfg);
      const BatchResult res = run_batch(run, threads);
      const RunPrediction pred = predict_run(run.gains, cfg.alpha_in, cfg.eta_dh,
                                             run.filter, 1.0 / n);
      double mean_f = 0.0, mean_std = 0.0;
      for (const auto& f : res.fidelity) {
        mean_f += f.value;
        mean_std += f.std_dev * f.std_dev;
      }
      mean_f /= res.fidelity.size();
      mean_std = std::sqrt(mean_std) / res.fidelity.size();
      csv.add_row_numeric({static_cast<double>(n), t_s, res.acceptance_rate,
                           pred.acceptance, mean_f, mean_std, theory(n, t_s, 0.90),
                           theory(n, t_s, 0.85), theory(n, t_s, 0.95),
                           no_cloning_limit(n)});
    }
  }
  out.write_text("fig3b_fidelity_vs_success.csv", csv.str());
  nlohmann::ordered_json info;
  info["eta_dh"] = 0.90;
  info["eta_band"] = 0.05;
  out.write_manifest("reproduce fig3b", {}, opt.seed.value_or(kDefaultSeed), threads,
                     info);
  std::cout << "fig3b data written to " << out.dir().string() << "\n";
  return 0;
}

int reproduce_figS1(const CommonOptions& opt) {
  OutputDir out(opt.out_dir.empty() ? "hcm_results" : opt.out_dir);
  const GainSet g = derive_gains(2, 0.6);
  CsvWriter csv({"alpha_abs", "g_total", "fidelity"});
  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  for (double a : {0.0, 0.25, 0.5, 1.0, 2.0, 5.0}) {
    double best_g = 0.0, best_f = -1.0;
    double flat_min = 2.0, flat_max = -1.0;
    for (int i = 0; i <= 160; ++i) {
      const double gt = 0.8 + 0.4 * i / 160.0;
      const double f = fidelity_nonunity(2, g.g_dla, gt, {2.0 * a, 0.0});
      csv.add_row_numeric({a, gt, f});
      // flat curves (alpha = 0) tie everywhere; prefer the point nearest 1
      if (f > best_f + 1e-15 ||
          (f > best_f - 1e-15 && std::abs(gt - 1.0) < std::abs(best_g - 1.0))) {
        best_f = std::max(best_f, f);
        best_g = gt;
      }
      if (gt >= 0.9 - 1e-12 && gt <= 1.1 + 1e-12) {
        flat_min = std::min(flat_min, f);
        flat_max = std::max(flat_max, f);
      }
    }
    nlohmann::ordered_json entry;
    entry["alpha_abs"] = a;
    entry["peak_g_total"] = best_g;
    entry["peak_fidelity"] = best_f;
    entry["flatness_0.9_1.1"] = flat_max - flat_min;
    summary.push_back(entry);
  }
  out.write_text("figS1_curves.csv", csv.str());
  nlohmann::ordered_json doc;
  doc["n_clones"] = 2;
  doc["t_s"] = 0.6;
  doc["curves"] = summary;
  out.write_json("summary.json", doc);
  out.write_manifest("reproduce figS1", {}, 0, 1, {});
  std::cout << "figS1 data written to " << out.dir().string() << "\n";
  return 0;
}

}  // namespace

int cmd_reproduce(const CommonOptions& opt) {
  try {
    if (opt.figure == "fig2") return reproduce_fig2(opt);
    if (opt.figure == "fig3a") return reproduce_fig3a(opt);
    if (opt.figure == "fig3b") return reproduce_fig3b(opt);
    if (opt.figure == "figS1") return reproduce_figS1(opt);
    std::cerr << "error: unknown figure \"" << opt.figure
              << "\" (expected fig2, fig3a, fig3b or figS1)\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace hcm::cli
