#include "hcm/engine.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "hcm/errors.hpp"

namespace hcm {

namespace {

constexpr std::uint32_t kStreamTagX = 1;
constexpr std::uint32_t kStreamTagP = 2;
constexpr std::uint32_t kStreamTagBootstrap = 1u << 16;

std::uint32_t stream_tag(QuadAxis axis) {
  return axis == QuadAxis::kX ? kStreamTagX : kStreamTagP;
}

// Neumaier compensated accumulator; keeps long reductions exact enough to be
// merge-order stable at the bit level.
struct Kahan {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct QuadAcc {
  std::uint64_t n = 0;
  Kahan s1;
  Kahan s2;

  void add(double v) {
    ++n;
    s1.add(v);
    s2.add(v * v);
  }
};

struct ChunkAcc {
  std::uint64_t shots = 0;
  std::uint64_t accepted = 0;
  std::uint64_t contained = 0;
  std::vector<QuadAcc> clone_x;
  std::vector<QuadAcc> clone_p;
};

double sample_variance(std::uint64_t n, double s1, double s2) {
  if (n < 2) return 0.0;
  const double mean = s1 / static_cast<double>(n);
  double var = (s2 - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
  return var > 0.0 ? var : 0.0;
}

// Coherent-input fidelity from estimated clone moments. Evaluated directly
// rather than through fidelity_gaussian: efficiency-corrected sample
// variances may dip below the vacuum level by sampling noise.
double coherent_input_fidelity(double mean_x, double mean_p, double var_x,
                               double var_p, const GaussianState& input) {
  const double vx = std::max(var_x, 0.0);
  const double vp = std::max(var_p, 0.0);
  const double dx = mean_x - input.mean.x;
  const double dp = mean_p - input.mean.p;
  const double f = 2.0 / std::sqrt((vx + 1.0) * (vp + 1.0)) *
                   std::exp(-0.5 * (dx * dx / (vx + 1.0) + dp * dp / (vp + 1.0)));
  return std::min(f, 1.0);
}

}  // namespace

void HcmConfig::validate() const {
  if (n_clones < 1) throw ConfigError("n_clones: must be >= 1");
  if (!std::isfinite(t_s) || t_s <= 0.0 || t_s >= 1.0) {
    throw ConfigError("t_s: must lie in (0, 1)");
  }
  if (t_s < 1.0 / static_cast<double>(n_clones) - 1e-9) {
    throw ConfigError("t_s: must be >= 1/n_clones for hybrid operation");
  }
  if (!std::isfinite(alpha_in.real()) || !std::isfinite(alpha_in.imag())) {
    throw ConfigError("alpha_in: must be finite");
  }
  auto check_eta = [](double eta, const char* name) {
    if (!(eta > 0.0 && eta <= 1.0)) {
      throw ConfigError(std::string(name) + ": must lie in (0, 1]");
    }
  };
  check_eta(eta_dh, "eta_dh");
  check_eta(eta_input, "eta_input");
  check_eta(eta_verify, "eta_verify");
  if (filter.g_prime && *filter.g_prime < 1.0) {
    throw ConfigError("filter.g_prime: must be >= 1");
  }
  if (!(filter.beta > 0.0)) throw ConfigError("filter.beta: must be > 0");
  if (!port_transmissions.empty()) {
    if (port_transmissions.size() != static_cast<std::size_t>(n_clones)) {
      throw ConfigError("port_transmissions: needs exactly n_clones entries");
    }
    double sum = 0.0;
    for (double p : port_transmissions) {
      if (!(p >= 0.0)) throw ConfigError("port_transmissions: entries must be >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ConfigError("port_transmissions: entries must sum to 1");
    }
  }
  if (shots < 1) throw ConfigError("shots: must be >= 1");
}

std::vector<double> HcmConfig::ports_or_uniform() const {
  if (!port_transmissions.empty()) return port_transmissions;
  return std::vector<double>(n_clones, 1.0 / static_cast<double>(n_clones));
}

ResolvedRun resolve(const HcmConfig& cfg) {
  cfg.validate();
  ResolvedRun run;
  run.cfg = cfg;
  run.gains = derive_gains(cfg.n_clones, cfg.t_s);

  const std::complex<double> alpha_max_filter =
      std::sqrt(cfg.eta_dh) * std::sqrt(1.0 - cfg.t_s) * cfg.alpha_in;
  if (cfg.filter.g_prime) {
    run.filter = make_filter_from_rule(*cfg.filter.g_prime, alpha_max_filter,
                                       cfg.filter.beta, cfg.filter.geometry);
  } else {
    const CutoffRule rule{cfg.filter.beta, alpha_max_filter, cfg.filter.geometry};
    run.filter = calibrate_gain(cfg.n_clones, cfg.t_s, cfg.eta_dh, rule, cfg.alpha_in);
    run.calibrated = true;
  }
  return run;
}

ShotRecord run_shot(const ResolvedRun& run, PhiloxStream& rng) {
  const HcmConfig& cfg = run.cfg;
  ShotRecord rec;

  // reflected port through the dual-homodyne loss, then the Q-function draw
  const std::complex<double> alpha_r = std::sqrt(1.0 - cfg.t_s) * cfg.alpha_in;
  const std::complex<double> center = std::sqrt(cfg.eta_dh) * alpha_r;
  const double sigma = std::sqrt(0.5);
  rec.alpha_m = {center.real() + sigma * rng.normal(),
                 center.imag() + sigma * rng.normal()};

  const double u = rng.uniform();
  rec.accepted = herald(run.filter, rec.alpha_m, u);
  if (rec.accepted) {
    const double lambda = run.gains.lambda_ff();
    rec.displaced_amplitude =
        std::sqrt(cfg.t_s) * cfg.alpha_in + lambda * rec.alpha_m;
  }
  return rec;
}

ShotRecord run_shot(const ResolvedRun& run, QuadAxis axis, std::uint64_t shot_index) {
  PhiloxStream rng(run.cfg.seed, shot_index, stream_tag(axis));
  return run_shot(run, rng);
}

void split_and_verify(ShotRecord& record, const ResolvedRun& run, QuadAxis axis,
                      PhiloxStream& rng) {
  if (!record.accepted) return;
  const std::vector<double> ports = run.cfg.ports_or_uniform();
  const double root_eta = std::sqrt(run.cfg.eta_verify);
  record.clone_samples.resize(ports.size());
  for (std::size_t i = 0; i < ports.size(); ++i) {
    const std::complex<double> clone_amp =
        std::sqrt(ports[i]) * record.displaced_amplitude;
    const double quad_mean =
        2.0 * (axis == QuadAxis::kX ? clone_amp.real() : clone_amp.imag());
    // loss keeps a coherent state at vacuum variance 1
    record.clone_samples[i] = root_eta * quad_mean + rng.normal();
  }
}

double CloneStatistics::acceptance_rate() const {
  return total_shots ? static_cast<double>(acceptance_count) / total_shots : 0.0;
}

double CloneStatistics::containment() const {
  return acceptance_count ? static_cast<double>(contained_count) / acceptance_count
                          : 1.0;
}

CloneStatistics correct_efficiency(const CloneStatistics& stats, double eta_tot) {
  if (!(eta_tot > 0.0 && eta_tot <= 1.0)) {
    throw std::invalid_argument("correct_efficiency: eta_tot outside (0, 1]");
  }
  CloneStatistics out = stats;
  const double mean_scale = 1.0 / std::sqrt(eta_tot);
  const double bias = (1.0 - eta_tot) / eta_tot;
  for (auto& c : out.clones) {
    c.mean_x = c.mean_x_raw * mean_scale;
    c.mean_p = c.mean_p_raw * mean_scale;
    c.var_x = c.var_x_raw / eta_tot - bias;
    c.var_p = c.var_p_raw / eta_tot - bias;
    c.corrected = true;
  }
  return out;
}

FidelityEstimate estimate_fidelity(const CloneStatistics::PerClone& clone,
                                   const GaussianState& input_state,
                                   double eta_tot) {
  if (clone.count_x < 2 || clone.count_p < 2) {
    throw InsufficientDataError("estimate_fidelity: need at least 2 samples per quadrature");
  }
  if (!clone.corrected) {
    throw std::invalid_argument("estimate_fidelity: statistics must be efficiency-corrected");
  }
  FidelityEstimate est;
  est.value = coherent_input_fidelity(clone.mean_x, clone.mean_p, clone.var_x,
                                      clone.var_p, input_state);
  est.n_samples = std::min(clone.count_x, clone.count_p);

  // Var(sigma^2): gaussian sampling term plus the systematic from the
  // efficiency used in the correction.
  const double delta_eta = std::min(0.05, 1.0 - eta_tot);
  auto var_of_var = [&](double var, double raw_var, std::uint64_t n) {
    const double stat = 2.0 * var * var / static_cast<double>(n - 1);
    const double dvar_deta = (1.0 - raw_var) / (eta_tot * eta_tot);
    const double sys = dvar_deta * delta_eta;
    return stat + sys * sys;
  };
  const double vx = std::max(clone.var_x, 0.0);
  const double vp = std::max(clone.var_p, 0.0);
  const double f_tilde = 2.0 / std::sqrt((vx + 1.0) * (vp + 1.0));
  const double dfx = -f_tilde / (2.0 * (vx + 1.0));
  const double dfp = -f_tilde / (2.0 * (vp + 1.0));
  est.std_dev = std::sqrt(dfx * dfx * var_of_var(vx, clone.var_x_raw, clone.count_x) +
                          dfp * dfp * var_of_var(vp, clone.var_p_raw, clone.count_p));
  return est;
}

namespace {

void accumulate_range(const ResolvedRun& run, QuadAxis axis, std::uint64_t begin,
                      std::uint64_t end, ChunkAcc& acc) {
  const std::size_t n_clones = static_cast<std::size_t>(run.cfg.n_clones);
  acc.clone_x.resize(axis == QuadAxis::kX ? n_clones : 0);
  acc.clone_p.resize(axis == QuadAxis::kP ? n_clones : 0);
  const std::vector<double> ports = run.cfg.ports_or_uniform();
  std::vector<double> root_ports(ports.size());
  for (std::size_t i = 0; i < ports.size(); ++i) root_ports[i] = std::sqrt(ports[i]);

  const HcmConfig& cfg = run.cfg;
  const std::complex<double> center =
      std::sqrt(cfg.eta_dh) * std::sqrt(1.0 - cfg.t_s) * cfg.alpha_in;
  const double sigma = std::sqrt(0.5);
  const double lambda = run.gains.lambda_ff();
  const double root_ts = std::sqrt(cfg.t_s);
  const double root_eta_v = std::sqrt(cfg.eta_verify);
  const std::uint32_t tag = stream_tag(axis);
  auto& clone_acc = (axis == QuadAxis::kX) ? acc.clone_x : acc.clone_p;

  for (std::uint64_t s = begin; s < end; ++s) {
    PhiloxStream rng(cfg.seed, s, tag);
    ++acc.shots;
    const std::complex<double> alpha_m{center.real() + sigma * rng.normal(),
                                       center.imag() + sigma * rng.normal()};
    const double u = rng.uniform();
    if (!herald(run.filter, alpha_m, u)) continue;
    ++acc.accepted;
    if (run.filter.inside(alpha_m)) ++acc.contained;

    const std::complex<double> displaced = root_ts * cfg.alpha_in + lambda * alpha_m;
    for (std::size_t i = 0; i < clone_acc.size(); ++i) {
      const std::complex<double> clone_amp = root_ports[i] * displaced;
      const double quad_mean =
          2.0 * (axis == QuadAxis::kX ? clone_amp.real() : clone_amp.imag());
      clone_acc[i].add(root_eta_v * quad_mean + rng.normal());
    }
  }
}

}  // namespace

BatchResult run_batch(const ResolvedRun& run, int threads, int n_blocks) {
  const HcmConfig& cfg = run.cfg;
  if (threads < 1) threads = 1;
  if (n_blocks < 0) n_blocks = 0;
  const std::uint64_t shots = cfg.shots;

  std::uint64_t chunk = 1u << 16;
  if (n_blocks > 0) {
    chunk = (shots + n_blocks - 1) / static_cast<std::uint64_t>(n_blocks);
    if (chunk == 0) chunk = 1;
  }
  const std::uint64_t n_chunks = (shots + chunk - 1) / chunk;

  // one task per (axis, chunk); results stored by index so the merge order is
  // fixed regardless of scheduling
  struct Task {
    QuadAxis axis;
    std::uint64_t begin, end;
  };
  std::vector<Task> tasks;
  tasks.reserve(2 * n_chunks);
  for (QuadAxis axis : {QuadAxis::kX, QuadAxis::kP}) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
      tasks.push_back({axis, c * chunk, std::min(shots, (c + 1) * chunk)});
    }
  }

  std::vector<ChunkAcc> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= tasks.size()) return;
      accumulate_range(run, tasks[idx].axis, tasks[idx].begin, tasks[idx].end,
                       results[idx]);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  const std::size_t n_clones = static_cast<std::size_t>(cfg.n_clones);
  BatchResult out;
  out.stats.clones.resize(n_clones);
  std::vector<QuadAcc> total_x(n_clones), total_p(n_clones);

  if (n_blocks > 0) {
    out.blocks.resize(n_chunks);
    for (auto& b : out.blocks) {
      b.x.resize(n_clones);
      b.p.resize(n_clones);
    }
  }

  for (std::size_t idx = 0; idx < tasks.size(); ++idx) {
    const ChunkAcc& acc = results[idx];
    out.stats.total_shots += acc.shots;
    out.stats.acceptance_count += acc.accepted;
    out.stats.contained_count += acc.contained;
    const std::size_t block_id = idx % n_chunks;
    if (n_blocks > 0) {
      out.blocks[block_id].shots += acc.shots;
      out.blocks[block_id].accepted += acc.accepted;
    }
    for (std::size_t i = 0; i < acc.clone_x.size(); ++i) {
      total_x[i].n += acc.clone_x[i].n;
      total_x[i].s1.add(acc.clone_x[i].s1.value());
      total_x[i].s2.add(acc.clone_x[i].s2.value());
      if (n_blocks > 0) {
        auto& b = out.blocks[block_id].x[i];
        b.n += acc.clone_x[i].n;
        b.s1 += acc.clone_x[i].s1.value();
        b.s2 += acc.clone_x[i].s2.value();
      }
    }
    for (std::size_t i = 0; i < acc.clone_p.size(); ++i) {
      total_p[i].n += acc.clone_p[i].n;
      total_p[i].s1.add(acc.clone_p[i].s1.value());
      total_p[i].s2.add(acc.clone_p[i].s2.value());
      if (n_blocks > 0) {
        auto& b = out.blocks[block_id].p[i];
        b.n += acc.clone_p[i].n;
        b.s1 += acc.clone_p[i].s1.value();
        b.s2 += acc.clone_p[i].s2.value();
      }
    }
  }

  for (std::size_t i = 0; i < n_clones; ++i) {
    auto& c = out.stats.clones[i];
    c.count_x = total_x[i].n;
    c.count_p = total_p[i].n;
    if (c.count_x > 0) c.mean_x_raw = total_x[i].s1.value() / c.count_x;
    if (c.count_p > 0) c.mean_p_raw = total_p[i].s1.value() / c.count_p;
    c.var_x_raw = sample_variance(c.count_x, total_x[i].s1.value(), total_x[i].s2.value());
    c.var_p_raw = sample_variance(c.count_p, total_p[i].s1.value(), total_p[i].s2.value());
  }

  out.stats = correct_efficiency(out.stats, cfg.eta_verify);
  out.acceptance_rate = out.stats.acceptance_rate();

  const GaussianState input = coherent(cfg.alpha_in.real(), cfg.alpha_in.imag());
  out.fidelity.reserve(n_clones);
  for (std::size_t i = 0; i < n_clones; ++i) {
    out.fidelity.push_back(
        estimate_fidelity(out.stats.clones[i], input, cfg.eta_verify));
  }
  return out;
}

BootstrapResult bootstrap_fidelity_distribution(const std::vector<BlockStats>& blocks,
                                                std::size_t clone_index,
                                                const GaussianState& input_state,
                                                double eta_tot, int n_replicates,
                                                std::uint64_t seed) {
  if (blocks.size() < 10) {
    throw InsufficientDataError("bootstrap: need at least 10 blocks");
  }
  if (n_replicates < 1) {
    throw std::invalid_argument("bootstrap: n_replicates must be >= 1");
  }
  const std::size_t n_blocks = blocks.size();

  BootstrapResult result;
  result.fidelities.reserve(n_replicates);
  Kahan sum, sumsq;
  for (int rep = 0; rep < n_replicates; ++rep) {
    PhiloxStream rng(seed, static_cast<std::uint64_t>(rep), kStreamTagBootstrap);
    std::uint64_t nx = 0, np = 0;
    double s1x = 0.0, s2x = 0.0, s1p = 0.0, s2p = 0.0;
    for (std::size_t k = 0; k < n_blocks; ++k) {
      const std::size_t pick =
          std::min(n_blocks - 1,
                   static_cast<std::size_t>(rng.uniform() * static_cast<double>(n_blocks)));
      const BlockStats& b = blocks[pick];
      nx += b.x[clone_index].n;
      s1x += b.x[clone_index].s1;
      s2x += b.x[clone_index].s2;
      np += b.p[clone_index].n;
      s1p += b.p[clone_index].s1;
      s2p += b.p[clone_index].s2;
    }
    if (nx < 2 || np < 2) continue;
    CloneStatistics::PerClone c;
    c.count_x = nx;
    c.count_p = np;
    c.mean_x_raw = s1x / nx;
    c.mean_p_raw = s1p / np;
    c.var_x_raw = sample_variance(nx, s1x, s2x);
    c.var_p_raw = sample_variance(np, s1p, s2p);
    CloneStatistics tmp;
    tmp.clones.push_back(c);
    tmp = correct_efficiency(tmp, eta_tot);
    const auto& cc = tmp.clones[0];
    const double f =
        coherent_input_fidelity(cc.mean_x, cc.mean_p, cc.var_x, cc.var_p, input_state);
    result.fidelities.push_back(f);
    sum.add(f);
    sumsq.add(f * f);
  }
  if (result.fidelities.empty()) {
    throw InsufficientDataError("bootstrap: no replicate had enough accepted samples");
  }
  const double n = static_cast<double>(result.fidelities.size());
  result.mean = sum.value() / n;
  const double var = std::max(0.0, sumsq.value() / n - result.mean * result.mean);
  result.std_dev = std::sqrt(var);
  return result;
}

}  // namespace hcm
