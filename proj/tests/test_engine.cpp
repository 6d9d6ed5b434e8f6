#include "hcm/engine.hpp"

#include <cmath>

#include "doctest.h"
#include "hcm/errors.hpp"

using namespace hcm;

namespace {

HcmConfig base_config() {
  HcmConfig cfg;
  cfg.n_clones = 2;
  cfg.t_s = 0.6;
  cfg.alpha_in = {1.115, 1.095};
  cfg.filter.g_prime = 1.1129298214738577;
  cfg.filter.beta = 3.0;
  cfg.eta_dh = 1.0;
  cfg.eta_input = 1.0;
  cfg.eta_verify = 1.0;
  cfg.shots = 100'000;
  cfg.seed = 20260811;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  HcmConfig cfg = base_config();
  CHECK_NOTHROW(cfg.validate());

  cfg.t_s = 0.4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = base_config();
  cfg.eta_dh = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = base_config();
  cfg.port_transmissions = {0.5, 0.6};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = base_config();
  cfg.port_transmissions = {0.5, 0.25, 0.25};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = base_config();
  cfg.shots = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("pass-all shot stream reproduces the boundary mean gain") {
  // at t_s = 1/N the feed-forward alone gives total amplitude gain sqrt(N)
  HcmConfig cfg = base_config();
  cfg.t_s = 0.5 + 1e-7;
  cfg.filter.g_prime = 1.0;  // accepts everything
  cfg.shots = 400'000;
  const ResolvedRun run = resolve(cfg);

  double sx = 0.0, sp = 0.0;
  std::uint64_t n = 0;
  for (std::uint64_t s = 0; s < cfg.shots; ++s) {
    const ShotRecord rec = run_shot(run, QuadAxis::kX, s);
    REQUIRE(rec.accepted);
    sx += rec.displaced_amplitude.real();
    sp += rec.displaced_amplitude.imag();
    ++n;
  }
  const double lambda = run.gains.lambda_ff();
  const double se = lambda * std::sqrt(0.5 / static_cast<double>(n));
  const std::complex<double> expect = std::sqrt(2.0) * cfg.alpha_in;
  CHECK(std::abs(sx / n - expect.real()) < 3.0 * se + 1e-6);
  CHECK(std::abs(sp / n - expect.imag()) < 3.0 * se + 1e-6);
}

TEST_CASE("zero input: displaced amplitudes are centred with the DLA noise") {
  HcmConfig cfg = base_config();
  cfg.alpha_in = {0.0, 0.0};
  cfg.filter.g_prime = 1.0;  // large-cutoff limit is exact for the trivial filter
  cfg.shots = 400'000;
  const ResolvedRun run = resolve(cfg);

  double s1 = 0.0, s2 = 0.0;
  for (std::uint64_t s = 0; s < cfg.shots; ++s) {
    const ShotRecord rec = run_shot(run, QuadAxis::kX, s);
    const double x = 2.0 * rec.displaced_amplitude.real();
    s1 += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(cfg.shots);
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  // with g' = 1, the pre-split quadrature spread is 4 lambda^2 Var(Re a_m) = 2 lambda^2
  const double lambda = run.gains.lambda_ff();
  const double expected = 2.0 * lambda * lambda;
  CHECK(std::abs(mean) < 3.0 * std::sqrt(expected / n));
  CHECK(std::abs(var - expected) < 3.0 * expected * std::sqrt(2.0 / n));
}

TEST_CASE("acceptance fraction matches the quadrature oracle") {
  HcmConfig cfg = base_config();
  cfg.eta_dh = 0.9;
  cfg.filter.g_prime = 1.17;
  cfg.filter.beta = 2.5;
  cfg.shots = 200'000;
  const ResolvedRun run = resolve(cfg);

  const std::complex<double> a0 =
      std::sqrt(cfg.eta_dh) * std::sqrt(1.0 - cfg.t_s) * cfg.alpha_in;
  const double p = success_probability(a0, run.filter);

  std::uint64_t acc = 0;
  for (std::uint64_t s = 0; s < cfg.shots; ++s) {
    if (run_shot(run, QuadAxis::kX, s).accepted) ++acc;
  }
  const double rate = static_cast<double>(acc) / cfg.shots;
  const double se = std::sqrt(p * (1.0 - p) / cfg.shots);
  CHECK(std::abs(rate - p) < 3.0 * se);
}

TEST_CASE("split_and_verify symmetry and corrected variance") {
  HcmConfig cfg = base_config();
  cfg.shots = 500'000;
  const ResolvedRun run = resolve(cfg);
  const BatchResult res = run_batch(run, 2);

  REQUIRE(res.stats.clones.size() == 2);
  const auto& c0 = res.stats.clones[0];
  const auto& c1 = res.stats.clones[1];
  REQUIRE(c0.count_x > 5000);

  // balanced split: the clones' means agree within 3 standard errors
  const double se_mean =
      3.0 * std::sqrt(c0.var_x / c0.count_x + c1.var_x / c1.count_x);
  CHECK(std::abs(c0.mean_x - c1.mean_x) < se_mean);

  // ideal N=2 T_s=0.6: corrected per-clone variance at the analytic value
  const double expect_var = 1.8257418583505538;
  const double se_var = expect_var * std::sqrt(2.0 / (c0.count_x - 1.0));
  CHECK(std::abs(c0.var_x - expect_var) < 3.5 * se_var);
  CHECK(std::abs(c0.var_p - expect_var) < 3.5 * se_var);
}

TEST_CASE("single-clone passthrough pipeline") {
  HcmConfig cfg = base_config();
  cfg.n_clones = 1;
  cfg.t_s = 1.0 - 1e-9;
  cfg.filter.g_prime = 1.0;
  cfg.alpha_in = {0.7, -0.4};
  cfg.shots = 300'000;
  const ResolvedRun run = resolve(cfg);
  const BatchResult res = run_batch(run, 2);
  CHECK(res.acceptance_rate == doctest::Approx(1.0));
  CHECK(res.fidelity[0].value > 0.995);
}

TEST_CASE("efficiency correction") {
  CloneStatistics stats;
  stats.clones.resize(1);
  auto& c = stats.clones[0];
  c.count_x = c.count_p = 100;
  c.mean_x_raw = 1.0;
  c.mean_p_raw = 0.0;
  c.var_x_raw = 1.0;
  c.var_p_raw = 1.0;

  const CloneStatistics ident = correct_efficiency(stats, 1.0);
  CHECK(ident.clones[0].mean_x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ident.clones[0].var_x == doctest::Approx(1.0).epsilon(1e-15));

  const CloneStatistics corr = correct_efficiency(stats, 0.97);
  CHECK(corr.clones[0].mean_x == doctest::Approx(1.0153461651336192).epsilon(1e-12));
  CHECK(corr.clones[0].var_x == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(correct_efficiency(stats, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(correct_efficiency(stats, 1.2), std::invalid_argument);
}

TEST_CASE("loss then correction round-trips the moments") {
  // verification loss at 0.9, then corrected with the same efficiency
  HcmConfig cfg = base_config();
  cfg.shots = 400'000;
  HcmConfig lossy = cfg;
  lossy.eta_verify = 0.9;

  const BatchResult ideal = run_batch(resolve(cfg), 2);
  const BatchResult corrected = run_batch(resolve(lossy), 2);

  const auto& a = ideal.stats.clones[0];
  const auto& b = corrected.stats.clones[0];
  const double se_mean = 3.5 * std::sqrt(a.var_x / a.count_x + b.var_x / b.count_x);
  CHECK(std::abs(a.mean_x - b.mean_x) < se_mean);
  const double se_var =
      3.5 * a.var_x * std::sqrt(2.0 / (a.count_x - 1.0) + 2.0 / (b.count_x - 1.0));
  CHECK(std::abs(a.var_x - b.var_x) < se_var + 0.01);
}

TEST_CASE("fidelity estimator") {
  const GaussianState input = coherent(0.5, 0.25);

  CloneStatistics stats;
  stats.clones.resize(1);
  auto& c = stats.clones[0];
  c.count_x = c.count_p = 1000;
  c.mean_x_raw = input.mean.x;
  c.mean_p_raw = input.mean.p;
  c.var_x_raw = 1.0;
  c.var_p_raw = 1.0;
  const CloneStatistics exact = correct_efficiency(stats, 1.0);
  const FidelityEstimate perfect = estimate_fidelity(exact.clones[0], input, 1.0);
  CHECK(perfect.value == doctest::Approx(1.0).epsilon(1e-12));

  auto& c2 = stats.clones[0];
  c2.var_x_raw = 3.0;
  c2.var_p_raw = 3.0;
  const CloneStatistics mp = correct_efficiency(stats, 1.0);
  const FidelityEstimate half = estimate_fidelity(mp.clones[0], input, 1.0);
  CHECK(half.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(half.std_dev > 0.0);

  CloneStatistics starved;
  starved.clones.resize(1);
  starved.clones[0].count_x = 1;
  starved.clones[0].count_p = 1;
  starved.clones[0].corrected = true;
  CHECK_THROWS_AS(estimate_fidelity(starved.clones[0], input, 1.0),
                  InsufficientDataError);
}

TEST_CASE("batch accumulation reproduces the per-shot api bit for bit") {
  // run_batch uses an inlined fast path; it must stay in lockstep with
  // run_shot + split_and_verify on the same counter streams
  HcmConfig cfg = base_config();
  cfg.eta_dh = 0.9;
  cfg.eta_verify = 0.95;
  cfg.shots = 20'000;
  const ResolvedRun run = resolve(cfg);
  const BatchResult batch = run_batch(run, 3);

  std::uint64_t accepted = 0;
  std::vector<double> s1x(2, 0.0), s1p(2, 0.0);
  for (QuadAxis axis : {QuadAxis::kX, QuadAxis::kP}) {
    for (std::uint64_t s = 0; s < cfg.shots; ++s) {
      PhiloxStream rng(cfg.seed, s, axis == QuadAxis::kX ? 1 : 2);
      ShotRecord rec = run_shot(run, rng);
      split_and_verify(rec, run, axis, rng);
      if (!rec.accepted) continue;
      ++accepted;
      for (int c = 0; c < 2; ++c) {
        (axis == QuadAxis::kX ? s1x : s1p)[c] += rec.clone_samples[c];
      }
    }
  }
  CHECK(accepted == batch.stats.acceptance_count);
  for (int c = 0; c < 2; ++c) {
    const auto& clone = batch.stats.clones[c];
    CHECK(s1x[c] / clone.count_x ==
          doctest::Approx(clone.mean_x_raw).epsilon(1e-13));
    CHECK(s1p[c] / clone.count_p ==
          doctest::Approx(clone.mean_p_raw).epsilon(1e-13));
  }
}

TEST_CASE("run_batch determinism across thread counts") {
  HcmConfig cfg = base_config();
  cfg.shots = 150'000;
  const ResolvedRun run = resolve(cfg);

  const BatchResult a = run_batch(run, 1);
  const BatchResult b = run_batch(run, 8);
  const BatchResult c = run_batch(run, 3);

  CHECK(a.stats.acceptance_count == b.stats.acceptance_count);
  for (std::size_t i = 0; i < a.stats.clones.size(); ++i) {
    CHECK(a.stats.clones[i].mean_x == b.stats.clones[i].mean_x);
    CHECK(a.stats.clones[i].var_x == b.stats.clones[i].var_x);
    CHECK(a.stats.clones[i].mean_p == c.stats.clones[i].mean_p);
    CHECK(a.stats.clones[i].var_p == c.stats.clones[i].var_p);
  }
  CHECK(a.fidelity[0].value == b.fidelity[0].value);
  CHECK(a.fidelity[0].std_dev == c.fidelity[0].std_dev);
}

TEST_CASE("monte carlo agrees with the analytic oracle on a grid") {
  // large-cutoff configs across N and T_s. Acceptance falls off like
  // exp(-beta^2 (g'^2 - 1)), so the upper T_s per N is capped where the
  // filter gain keeps at least a few hundred accepted shots out of 6e5.
  const double upper_ts[] = {0.66, 0.50, 0.42, 0.34};
  for (int n : {2, 3, 4, 5}) {
    for (double t_s : {1.0 / n + 0.1, upper_ts[n - 2]}) {
      HcmConfig cfg = base_config();
      cfg.n_clones = n;
      cfg.t_s = t_s;
      cfg.alpha_in = {0.4, 0.2};
      cfg.filter.g_prime.reset();  // calibrate
      cfg.filter.beta = 3.5;
      cfg.shots = 600'000;
      const ResolvedRun run = resolve(cfg);
      const BatchResult res = run_batch(run, 4);

      const CloneMoments oracle =
          clone_moments_ideal(run.gains, to_quadratures(cfg.alpha_in));
      const std::complex<double> a0 =
          std::sqrt(1.0 - t_s) * cfg.alpha_in;
      const double p_oracle = success_probability(a0, run.filter);

      const double se_acc =
          std::sqrt(p_oracle * (1.0 - p_oracle) / res.stats.total_shots);
      CHECK(std::abs(res.acceptance_rate - p_oracle) < 3.5 * se_acc);

      for (const auto& clone : res.stats.clones) {
        REQUIRE(clone.count_x > 400);
        const double se_m = std::sqrt(clone.var_x / clone.count_x);
        const double se_v = clone.var_x * std::sqrt(2.0 / (clone.count_x - 1.0));
        CHECK(std::abs(clone.mean_x - oracle.mean.x) < 3.5 * se_m + 2e-3);
        CHECK(std::abs(clone.var_x - oracle.variance_x) < 3.5 * se_v + 2e-3);
        CHECK(std::abs(clone.mean_p - oracle.mean.p) < 3.5 * se_m + 2e-3);
        CHECK(std::abs(clone.var_p - oracle.variance_p) < 3.5 * se_v + 2e-3);
      }
    }
  }
}

TEST_CASE("imbalanced port transmissions skew the clone means") {
  HcmConfig cfg = base_config();
  cfg.port_transmissions = {0.7, 0.3};
  cfg.shots = 300'000;
  const ResolvedRun run = resolve(cfg);
  const BatchResult res = run_batch(run, 2);

  const auto& c0 = res.stats.clones[0];
  const auto& c1 = res.stats.clones[1];
  REQUIRE(c0.count_x > 2000);
  // clone amplitudes scale with sqrt(port); the pre-split mean is sqrt(2) alpha
  const double pre_x = std::sqrt(2.0) * 2.0 * cfg.alpha_in.real();
  const double se = 3.5 * std::sqrt(c0.var_x / c0.count_x);
  CHECK(std::abs(c0.mean_x - std::sqrt(0.7) * pre_x) < se);
  CHECK(std::abs(c1.mean_x - std::sqrt(0.3) * pre_x) < se);
  CHECK(c0.mean_x > c1.mean_x);
  // the heavier port carries more displacement noise
  CHECK(c0.var_x > c1.var_x);
}

TEST_CASE("rect cutoff geometry runs end to end") {
  HcmConfig cfg = base_config();
  cfg.filter.g_prime.reset();  // calibrate with the rect acceptance region
  cfg.filter.geometry = CutoffGeometry::kRect;
  cfg.filter.beta = 3.0;
  cfg.eta_dh = 0.9;
  cfg.shots = 400'000;
  const ResolvedRun run = resolve(cfg);
  CHECK(run.filter.geometry == CutoffGeometry::kRect);
  const BatchResult res = run_batch(run, 2);

  const std::complex<double> a0 =
      std::sqrt(cfg.eta_dh) * std::sqrt(1.0 - cfg.t_s) * cfg.alpha_in;
  const double p = success_probability(a0, run.filter);
  const double se = std::sqrt(p * (1.0 - p) / res.stats.total_shots);
  CHECK(std::abs(res.acceptance_rate - p) < 3.5 * se);

  // calibration holds for the rect region too: corrected mean equals input
  for (const auto& clone : res.stats.clones) {
    const double se_m = 3.5 * std::sqrt(clone.var_x / clone.count_x);
    CHECK(std::abs(clone.mean_x - 2.23) < se_m);
    CHECK(std::abs(clone.mean_p - 2.19) < se_m);
  }
}

TEST_CASE("bootstrap fidelity distribution") {
  HcmConfig cfg = base_config();
  cfg.eta_dh = 1.0;
  cfg.shots = 200'000;
  const ResolvedRun run = resolve(cfg);
  const BatchResult res = run_batch(run, 2, 50);
  REQUIRE(res.blocks.size() == 50);

  const GaussianState input = coherent(cfg.alpha_in.real(), cfg.alpha_in.imag());
  const BootstrapResult boot = bootstrap_fidelity_distribution(
      res.blocks, 0, input, cfg.eta_verify, 400, cfg.seed);

  // distribution centred on the point estimate
  CHECK(std::abs(boot.mean - res.fidelity[0].value) <
        std::max(res.fidelity[0].std_dev, 3.0 * boot.std_dev / std::sqrt(400.0)));

  // ideal two-clone run sits above the deterministic bound
  std::size_t above = 0;
  for (double f : boot.fidelities) {
    if (f > 2.0 / 3.0) ++above;
  }
  CHECK(static_cast<double>(above) / boot.fidelities.size() > 0.99);

  // two seeds agree within combined uncertainty
  HcmConfig cfg2 = cfg;
  cfg2.seed = 777;
  const BatchResult res2 = run_batch(resolve(cfg2), 2, 50);
  const BootstrapResult boot2 = bootstrap_fidelity_distribution(
      res2.blocks, 0, input, cfg2.eta_verify, 400, cfg2.seed);
  CHECK(std::abs(boot.mean - boot2.mean) <
        3.0 * std::hypot(boot.std_dev, boot2.std_dev));

  CHECK_THROWS_AS(
      bootstrap_fidelity_distribution({}, 0, input, 1.0, 100, 1),
      InsufficientDataError);
}

TEST_CASE("per-sample blocks degenerate to a jackknife-style resample") {
  HcmConfig cfg = base_config();
  cfg.shots = 4000;
  const ResolvedRun run = resolve(cfg);
  const BatchResult res = run_batch(run, 1, static_cast<int>(cfg.shots));
  REQUIRE(res.blocks.size() == cfg.shots);

  const GaussianState input = coherent(cfg.alpha_in.real(), cfg.alpha_in.imag());
  const BootstrapResult boot = bootstrap_fidelity_distribution(
      res.blocks, 0, input, cfg.eta_verify, 200, cfg.seed);
  CHECK(std::abs(boot.mean - res.fidelity[0].value) < 4.0 * boot.std_dev);
}
