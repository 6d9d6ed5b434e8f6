#pragma once

#include <complex>

#include "hcm/filter.hpp"
#include "hcm/gaussian.hpp"

namespace hcm {

// Gain bundle of the hybrid amplifier at unity total gain.
struct GainSet {
  double g_dla = 1.0;
  double g_nla = 1.0;
  double g_nla_prime = 1.0;
  double g_xp = 0.0;
  double g_total = 1.0;
  double t_s = 1.0;
  int n_clones = 1;

  // feed-forward displacement coefficient in alpha units, g_xp / sqrt(2)
  double lambda_ff() const;
};

struct CloneMoments {
  Quadratures mean;
  double variance_x = 1.0;
  double variance_p = 1.0;
  int n_clones = 1;
};

// Solves the unity-gain conditions for (N, T_s):
//   g_dla = (N / T_s)^(1/4),  g_nla = sqrt(T_s) g_dla,
//   g_nla_prime^2 = T_s (g_dla^2 - 1) / (1 - T_s),
//   g_xp = sqrt(2 (1/T_s - 1)).
// T_s below 1/N (beyond a 1e-9 slack) is a RegimeError; T_s >= 1 is invalid.
// The T_s = 1/N boundary (pure deterministic amplifier, g_nla = 1) is allowed.
GainSet derive_gains(int n_clones, double t_s);

// Per-clone moments of the ideal machine: mean equals the input, variance
// 1 + 2 (g_dla^2 - 1) / N in both quadratures.
CloneMoments clone_moments_ideal(const GainSet& gains, const Quadratures& alpha_in);

// Same moments computed along the conceptual amplifier concatenation
// (noiseless gain, then deterministic gain, then N-port split). Agrees with
// clone_moments_ideal to rounding.
CloneMoments equivalent_concatenation_moments(const GainSet& gains,
                                              const Quadratures& alpha_in);

// F(N) = 1 / (1 + (g_dla^2 - 1)/N) at unity gain.
double fidelity_unity(int n_clones, double t_s);

// F(N) for total gain g: unity-gain value times
// exp[-(g-1)^2 |alpha_i|^2 / (1 + (g_dla^2 - 1)/N)].
double fidelity_nonunity(int n_clones, double g_dla, double g_total,
                         const Quadratures& alpha_in);

// Deterministic Gaussian 1->N bound, N / (2N - 1).
double no_cloning_limit(int n_clones);

// Limit of fidelity_unity for T_s -> 1: 1 / (1 + (sqrt(N) - 1)/N).
double fidelity_max(int n_clones);

// Moments of the heralded outcome distribution p_F(a) Q(a - alpha0):
// success probability, conditional mean and per-component (co)variances.
// alpha0 is the amplitude seen by the filter stage (reflected port, caller
// applies sqrt(1 - T_s) and any efficiency factor).
struct FilterMoments {
  double probability = 1.0;
  std::complex<double> mean;
  double var_re = 0.5;
  double var_im = 0.5;
  double cov = 0.0;
};

FilterMoments postfilter_moments(std::complex<double> alpha0,
                                 const HeraldingFilter& filter);

double success_probability(std::complex<double> alpha0, const HeraldingFilter& filter);

// Quadrature-exact prediction of one clone's verification moments and
// fidelity for a concrete filter and dual-homodyne efficiency, including
// finite-cutoff truncation effects.
struct RunPrediction {
  double acceptance = 1.0;
  double mean_x = 0.0, mean_p = 0.0;  // quadrature units
  double var_x = 1.0, var_p = 1.0;
  double fidelity = 1.0;
};

RunPrediction predict_run(const GainSet& gains, std::complex<double> alpha_in,
                          double eta_dh, const HeraldingFilter& filter,
                          double port_transmission);

}  // namespace hcm
