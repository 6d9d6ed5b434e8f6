#pragma once

#include <complex>
#include <vector>

namespace hcm {

// Conventions used throughout: vacuum quadrature variance is 1 and the
// complex amplitude relates to the quadratures as alpha = (x + i p) / 2,
// i.e. a coherent state |alpha> has mean (2 Re alpha, 2 Im alpha) and
// identity covariance.

struct Quadratures {
  double x = 0.0;
  double p = 0.0;
};

// Symmetric 2x2 covariance in (x, p) order.
struct Cov2 {
  double xx = 1.0;
  double xp = 0.0;
  double pp = 1.0;

  double det() const { return xx * pp - xp * xp; }
};

struct GaussianState {
  Quadratures mean;
  Cov2 cov;
};

struct WignerGrid {
  std::vector<double> x_axis;
  std::vector<double> p_axis;
  // values[i * p_axis.size() + j] = W(x_axis[i], p_axis[j])
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * p_axis.size() + j]; }
};

inline double quad_abs_sq(const Quadratures& q) { return q.x * q.x + q.p * q.p; }

inline std::complex<double> to_amplitude(const Quadratures& q) {
  return {q.x / 2.0, q.p / 2.0};
}

inline Quadratures to_quadratures(std::complex<double> alpha) {
  return {2.0 * alpha.real(), 2.0 * alpha.imag()};
}

// Throws std::invalid_argument unless cov is symmetric positive definite
// with det >= 1 - 1e-9 (physical in vacuum-variance-1 units).
void validate_state(const GaussianState& s);

GaussianState coherent(double alpha_re, double alpha_im);

GaussianState vacuum();

// Mean map: out1 = sqrt(T) a + sqrt(1-T) b, out2 = sqrt(1-T) a - sqrt(T) b.
// Inputs are treated as independent modes and only single-mode marginals are
// returned; cross-correlations between the outputs are dropped, which is
// exact for equal input covariances (all pipeline inputs are coherent).
std::pair<GaussianState, GaussianState> beamsplitter_pair(const GaussianState& a,
                                                          const GaussianState& b,
                                                          double transmission);

// Pure loss: mean *= sqrt(eta), cov -> eta cov + (1-eta) I.
GaussianState loss_channel(const GaussianState& s, double eta);

GaussianState displace(const GaussianState& s, double dx, double dp);

// Uhlmann fidelity between two single-mode Gaussian states in closed form.
double fidelity_gaussian(const GaussianState& rho_i, const GaussianState& rho_o);

// Wigner function of a Gaussian state sampled on a rectangular grid, with the
// probability-density normalisation (integral over the x-p plane equals 1).
WignerGrid wigner(const GaussianState& s, std::vector<double> x_axis,
                  std::vector<double> p_axis);

std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace hcm
