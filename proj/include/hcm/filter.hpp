#pragma once

#include <complex>
#include <string>

namespace hcm {

enum class CutoffGeometry { kRadial, kRect };

std::string to_string(CutoffGeometry g);
CutoffGeometry cutoff_geometry_from_string(const std::string& name);

// Gaussian acceptance filter of the measurement-based noiseless amplifier.
// Amplitudes are in alpha units: a dual-homodyne outcome (x_m, p_m) maps to
// alpha_m = (x_m + i p_m) / sqrt(2).
struct HeraldingFilter {
  double g_prime = 1.0;   // amplifier gain, >= 1
  double cutoff = 0.0;    // radial cutoff |alpha_c| (Euclidean norm of the
                          // per-quadrature cutoffs)
  double cutoff_re = 0.0; // per-quadrature cutoffs, used by the rect geometry
  double cutoff_im = 0.0;
  CutoffGeometry geometry = CutoffGeometry::kRadial;

  // log M with M = exp[cutoff^2 (1 - 1/g'^2)]; kept in log form because M
  // overflows double for very large cutoffs.
  double log_norm() const;
  double norm_m() const;
  bool inside(std::complex<double> alpha_m) const;
};

// Filter with a directly specified radial cutoff (per-quadrature cutoffs set
// to cutoff/sqrt(2), only relevant to the rect geometry).
HeraldingFilter make_filter(double g_prime, double cutoff,
                            CutoffGeometry geometry = CutoffGeometry::kRadial);

// Per-quadrature cutoff rule: c_q = g'^2 |q(alpha_max)| + beta sqrt(0.5) g',
// combined into the radial cutoff as the Euclidean norm. alpha_max is the
// largest amplitude the filter stage will see (reflected port, after any
// efficiency attenuation).
HeraldingFilter make_filter_from_rule(double g_prime, std::complex<double> alpha_max,
                                      double beta,
                                      CutoffGeometry geometry = CutoffGeometry::kRadial);

// Radial cutoff produced by the rule above.
double choose_cutoff(double g_prime, std::complex<double> alpha_max, double beta);

// p_F(alpha_m): exp[(|alpha_m|^2 - cutoff^2)(1 - 1/g'^2)] inside the cutoff
// region, 1 outside. Continuous at the radial boundary where it reaches 1.
double acceptance_probability(const HeraldingFilter& filter,
                              std::complex<double> alpha_m);

// Accept iff u < p_F(alpha_m); u from the caller's uniform stream in [0, 1).
bool herald(const HeraldingFilter& filter, std::complex<double> alpha_m, double u);

struct DualHomodyneOutcome {
  std::complex<double> alpha_m;
  bool accepted = false;
};

// Finds the filter gain g' in [1, 10] for which the per-clone mean gain of
// the full feed-forward chain is 1, using deterministic quadrature for the
// post-filter mean. The cutoff follows the rule for each candidate gain.
struct CutoffRule {
  double beta = 3.0;
  std::complex<double> alpha_max;  // filter-stage units
  CutoffGeometry geometry = CutoffGeometry::kRadial;
};

HeraldingFilter calibrate_gain(int n_clones, double t_s, double eta_dh,
                               const CutoffRule& rule,
                               std::complex<double> alpha_ref);

}  // namespace hcm
