#include "hcm/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hcm {

namespace {

constexpr double kSymTol = 1e-12;
constexpr double kPhysTol = 1e-9;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void validate_state(const GaussianState& s) {
  if (!finite(s.mean.x) || !finite(s.mean.p)) {
    throw std::invalid_argument("gaussian state: non-finite mean");
  }
  if (!finite(s.cov.xx) || !finite(s.cov.xp) || !finite(s.cov.pp)) {
    throw std::invalid_argument("gaussian state: non-finite covariance");
  }
  if (s.cov.xx <= 0.0 || s.cov.pp <= 0.0 || s.cov.det() <= 0.0) {
    throw std::invalid_argument("gaussian state: covariance not positive definite");
  }
  if (s.cov.det() < 1.0 - kPhysTol) {
    throw std::invalid_argument("gaussian state: det(cov) below vacuum limit");
  }
}

GaussianState coherent(double alpha_re, double alpha_im) {
  if (!finite(alpha_re) || !finite(alpha_im)) {
    throw std::invalid_argument("coherent: non-finite amplitude");
  }
  return {{2.0 * alpha_re, 2.0 * alpha_im}, {1.0, 0.0, 1.0}};
}

GaussianState vacuum() { return coherent(0.0, 0.0); }

std::pair<GaussianState, GaussianState> beamsplitter_pair(const GaussianState& a,
                                                          const GaussianState& b,
                                                          double transmission) {
  if (!(transmission >= 0.0 && transmission <= 1.0)) {
    throw std::invalid_argument("beamsplitter_pair: transmission outside [0, 1]");
  }
  const double t = std::sqrt(transmission);
  const double r = std::sqrt(1.0 - transmission);

  GaussianState out1, out2;
  out1.mean = {t * a.mean.x + r * b.mean.x, t * a.mean.p + r * b.mean.p};
  out2.mean = {r * a.mean.x - t * b.mean.x, r * a.mean.p - t * b.mean.p};

  const double T = transmission, R = 1.0 - transmission;
  out1.cov = {T * a.cov.xx + R * b.cov.xx, T * a.cov.xp + R * b.cov.xp,
              T * a.cov.pp + R * b.cov.pp};
  out2.cov = {R * a.cov.xx + T * b.cov.xx, R * a.cov.xp + T * b.cov.xp,
              R * a.cov.pp + T * b.cov.pp};
  return {out1, out2};
}

GaussianState loss_channel(const GaussianState& s, double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("loss_channel: eta outside (0, 1]");
  }
  const double root = std::sqrt(eta);
  GaussianState out;
  out.mean = {root * s.mean.x, root * s.mean.p};
  out.cov = {eta * s.cov.xx + (1.0 - eta), eta * s.cov.xp, eta * s.cov.pp + (1.0 - eta)};
  return out;
}

GaussianState displace(const GaussianState& s, double dx, double dp) {
  if (!finite(dx) || !finite(dp)) {
    throw std::invalid_argument("displace: non-finite displacement");
  }
  return {{s.mean.x + dx, s.mean.p + dp}, s.cov};
}

double fidelity_gaussian(const GaussianState& rho_i, const GaussianState& rho_o) {
  validate_state(rho_i);
  validate_state(rho_o);

  const Cov2 sum{rho_i.cov.xx + rho_o.cov.xx, rho_i.cov.xp + rho_o.cov.xp,
                 rho_i.cov.pp + rho_o.cov.pp};
  const double big_delta = sum.det();
  double small_delta = (rho_i.cov.det() - 1.0) * (rho_o.cov.det() - 1.0);
  if (small_delta < 0.0) small_delta = 0.0;  // pure states, rounding

  const double dx = rho_o.mean.x - rho_i.mean.x;
  const double dp = rho_o.mean.p - rho_i.mean.p;
  // d^T (Vi + Vo)^-1 d
  const double quad =
      (sum.pp * dx * dx - 2.0 * sum.xp * dx * dp + sum.xx * dp * dp) / big_delta;

  const double denom = std::sqrt(big_delta + small_delta) - std::sqrt(small_delta);
  return 2.0 / denom * std::exp(-0.5 * quad);
}

WignerGrid wigner(const GaussianState& s, std::vector<double> x_axis,
                  std::vector<double> p_axis) {
  validate_state(s);
  auto check_axis = [](const std::vector<double>& ax) {
    if (ax.size() < 2) throw std::invalid_argument("wigner: axis needs >= 2 samples");
    for (std::size_t i = 1; i < ax.size(); ++i) {
      if (!(ax[i] > ax[i - 1])) {
        throw std::invalid_argument("wigner: axis not strictly increasing");
      }
    }
  };
  check_axis(x_axis);
  check_axis(p_axis);

  const double det = s.cov.det();
  if (!(det > 1e-12)) throw std::invalid_argument("wigner: degenerate covariance");
  const double inv_xx = s.cov.pp / det;
  const double inv_xp = -s.cov.xp / det;
  const double inv_pp = s.cov.xx / det;
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));

  WignerGrid grid;
  grid.values.resize(x_axis.size() * p_axis.size());
  for (std::size_t i = 0; i < x_axis.size(); ++i) {
    const double dx = x_axis[i] - s.mean.x;
    for (std::size_t j = 0; j < p_axis.size(); ++j) {
      const double dp = p_axis[j] - s.mean.p;
      const double quad = inv_xx * dx * dx + 2.0 * inv_xp * dx * dp + inv_pp * dp * dp;
      grid.values[i * p_axis.size() + j] = norm * std::exp(-0.5 * quad);
    }
  }
  grid.x_axis = std::move(x_axis);
  grid.p_axis = std::move(p_axis);
  return grid;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

}  // namespace hcm
