#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "hcm/analytic.hpp"
#include "hcm/filter.hpp"
#include "hcm/gaussian.hpp"
#include "hcm/rng.hpp"

namespace hcm {

struct FilterSpec {
  std::optional<double> g_prime;  // empty: calibrate for unity mean gain
  double beta = 3.0;
  CutoffGeometry geometry = CutoffGeometry::kRadial;
};

struct HcmConfig {
  int n_clones = 2;
  double t_s = 0.6;
  std::complex<double> alpha_in;  // alpha units
  FilterSpec filter;
  double eta_dh = 0.90;
  double eta_input = 0.97;   // input characterisation efficiency; carried for
                             // manifests, the simulated input is known exactly
  double eta_verify = 0.985;
  std::vector<double> port_transmissions;  // empty: balanced 1/N split
  std::uint64_t shots = 1'000'000;         // per verification quadrature stream
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError with the offending field
  std::vector<double> ports_or_uniform() const;
};

// Config with derived gains and a concrete (possibly calibrated) filter.
struct ResolvedRun {
  HcmConfig cfg;
  GainSet gains;
  HeraldingFilter filter;
  bool calibrated = false;
};

ResolvedRun resolve(const HcmConfig& cfg);

enum class QuadAxis { kX, kP };

struct ShotRecord {
  std::complex<double> alpha_m;
  bool accepted = false;
  std::complex<double> displaced_amplitude;  // only meaningful when accepted
  std::vector<double> clone_samples;         // homodyne readings, active quadrature
};

// One pass through the pipeline: tap-off, lossy dual-homodyne, herald,
// feed-forward displacement. Clone verification is done by split_and_verify.
// All randomness comes from the (seed, shot, axis) counter stream.
ShotRecord run_shot(const ResolvedRun& run, PhiloxStream& rng);
ShotRecord run_shot(const ResolvedRun& run, QuadAxis axis, std::uint64_t shot_index);

// N-port split of an accepted shot plus per-clone verification homodyne of
// the stream's quadrature; fills record.clone_samples.
void split_and_verify(ShotRecord& record, const ResolvedRun& run, QuadAxis axis,
                      PhiloxStream& rng);

struct CloneStatistics {
  struct PerClone {
    std::uint64_t count_x = 0, count_p = 0;
    double mean_x_raw = 0.0, var_x_raw = 0.0;
    double mean_p_raw = 0.0, var_p_raw = 0.0;
    double mean_x = 0.0, var_x = 0.0;  // efficiency-corrected
    double mean_p = 0.0, var_p = 0.0;
    bool corrected = false;
  };
  std::vector<PerClone> clones;
  std::uint64_t total_shots = 0;  // both streams
  std::uint64_t acceptance_count = 0;
  std::uint64_t contained_count = 0;  // accepted outcomes inside the cutoff
  double acceptance_rate() const;
  double containment() const;
};

// Mean rescaled by 1/sqrt(eta), variance mapped through
// var/eta - (1 - eta)/eta. eta_tot is the detection efficiency of the data.
CloneStatistics correct_efficiency(const CloneStatistics& stats, double eta_tot);

struct FidelityEstimate {
  double value = 0.0;
  double std_dev = 0.0;
  std::uint64_t n_samples = 0;
};

// Coherent-input fidelity from corrected clone moments, with uncertainty from
// Var(sigma^2) = 2 sigma^4/(n-1) plus a systematic term for the efficiency
// used in the correction (delta_eta = min(0.05, 1 - eta_tot)).
FidelityEstimate estimate_fidelity(const CloneStatistics::PerClone& clone,
                                   const GaussianState& input_state,
                                   double eta_tot);

struct BlockStats {
  std::uint64_t shots = 0;
  std::uint64_t accepted = 0;
  // per clone: count, sum, sum of squares for the block's stream quadrature
  struct Acc {
    std::uint64_t n = 0;
    double s1 = 0.0, s2 = 0.0;
  };
  std::vector<Acc> x;  // per clone
  std::vector<Acc> p;
};

struct BatchResult {
  CloneStatistics stats;                    // corrected with eta_verify
  std::vector<FidelityEstimate> fidelity;   // per clone
  double acceptance_rate = 0.0;
  std::vector<BlockStats> blocks;           // present when n_blocks > 0
};

// Deterministic given (cfg, seed): shots are indexed, each shot draws from a
// counter stream keyed by (seed, index, axis), and reduction order is fixed,
// so results are independent of the worker count.
BatchResult run_batch(const ResolvedRun& run, int threads, int n_blocks = 0);

struct BootstrapResult {
  std::vector<double> fidelities;  // one per replicate
  double mean = 0.0;
  double std_dev = 0.0;
};

// Block bootstrap over the per-block sufficient statistics of one clone.
BootstrapResult bootstrap_fidelity_distribution(const std::vector<BlockStats>& blocks,
                                                std::size_t clone_index,
                                                const GaussianState& input_state,
                                                double eta_tot, int n_replicates,
                                                std::uint64_t seed);

}  // namespace hcm
