#include "hcm/analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hcm/errors.hpp"

namespace hcm {

namespace {

constexpr double kBoundarySlack = 1e-9;
constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// small vector quadrature toolkit
//
// All heralded-moment integrals are reduced to integrals of a 6-vector of
// monomial weights (1, x, y, x^2, y^2, xy) against a Gaussian restricted to
// the cutoff region. The angular integral is periodic and evaluated with a
// doubling trapezoid rule; the radial (or cartesian) integral uses adaptive
// Simpson on the vector.
// ---------------------------------------------------------------------------

using Vec6 = std::array<double, 6>;

Vec6 operator+(const Vec6& a, const Vec6& b) {
  Vec6 r;
  for (int i = 0; i < 6; ++i) r[i] = a[i] + b[i];
  return r;
}

Vec6 operator-(const Vec6& a, const Vec6& b) {
  Vec6 r;
  for (int i = 0; i < 6; ++i) r[i] = a[i] - b[i];
  return r;
}

Vec6 operator*(double s, const Vec6& a) {
  Vec6 r;
  for (int i = 0; i < 6; ++i) r[i] = s * a[i];
  return r;
}

double max_abs(const Vec6& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

Vec6 weights_at(double x, double y) { return {1.0, x, y, x * x, y * y, x * y}; }

// Trapezoid rule over one period with node doubling; exponentially convergent
// for smooth periodic integrands.
template <typename F>
Vec6 periodic_trapezoid(F&& f, double tol) {
  std::size_t n = 32;
  const double period = 2.0 * kPi;
  Vec6 acc{};
  for (std::size_t k = 0; k < n; ++k) acc = acc + f(period * static_cast<double>(k) / n);
  Vec6 prev = (period / n) * acc;
  for (int pass = 0; pass < 11; ++pass) {
    // add midpoints of the current grid
    for (std::size_t k = 0; k < n; ++k) {
      acc = acc + f(period * (static_cast<double>(k) + 0.5) / n);
    }
    n *= 2;
    Vec6 cur = (period / n) * acc;
    if (max_abs(cur - prev) <= tol * std::max(1.0, max_abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

Vec6 simpson_panel(double a, double b, const Vec6& fa, const Vec6& fm,
                   const Vec6& fb) {
  return ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
}

template <typename F>
Vec6 adaptive_simpson_rec(F& f, double a, double b, const Vec6& fa, const Vec6& fm,
                          const Vec6& fb, const Vec6& whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const Vec6 fl = f(0.5 * (a + m));
  const Vec6 fr = f(0.5 * (m + b));
  const Vec6 left = simpson_panel(a, m, fa, fl, fm);
  const Vec6 right = simpson_panel(m, b, fm, fr, fb);
  const Vec6 err = (left + right) - whole;
  if (max_abs(err) <= 15.0 * tol || depth <= 0) {
    if (depth <= 0 && max_abs(err) > 15.0 * std::max(tol, 1e-6)) {
      throw NumericError("quadrature failed to converge");
    }
    return left + right + (1.0 / 15.0) * err;
  }
  return adaptive_simpson_rec(f, a, m, fa, fl, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, fr, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
Vec6 adaptive_simpson(F&& f, double a, double b, double tol, int depth = 42) {
  if (!(b > a)) return Vec6{};
  const Vec6 fa = f(a);
  const Vec6 fm = f(0.5 * (a + b));
  const Vec6 fb = f(b);
  const Vec6 whole = simpson_panel(a, b, fa, fm, fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Splits [a, b] at the interior hump locations so the adaptive pass starts
// from well-behaved panels.
template <typename F>
Vec6 integrate_split(F&& f, double a, double b, std::initializer_list<double> seams,
                     double tol) {
  std::array<double, 6> pts{};
  std::size_t n = 0;
  pts[n++] = a;
  for (double s : seams) {
    if (s > a && s < b) pts[n++] = s;
  }
  pts[n++] = b;
  std::sort(pts.begin(), pts.begin() + n);
  Vec6 total{};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    total = total + adaptive_simpson(f, pts[i], pts[i + 1], tol);
  }
  return total;
}

struct WeightedPart {
  double log_scale = -std::numeric_limits<double>::infinity();
  Vec6 moments{};  // conditional moments (component 0 normalised to 1)
  bool empty = true;
};

WeightedPart finish_part(double log_prefactor, const Vec6& raw) {
  WeightedPart part;
  if (!(raw[0] > 0.0)) return part;
  part.empty = false;
  part.log_scale = log_prefactor + std::log(raw[0]);
  part.moments = (1.0 / raw[0]) * raw;
  return part;
}

// Gaussian mass (and monomial moments) of N(mu, sigma^2 per component) inside
// the radial cutoff disc, integrated in polar coordinates about the origin.
WeightedPart inside_moments_radial(std::complex<double> mu, double sigma_sq,
                                   double cutoff, double log_prefactor, double tol) {
  if (cutoff <= 0.0) return {};
  const double m = std::abs(mu);
  const double phi = (m > 0.0) ? std::arg(mu) : 0.0;
  const double width = 9.5 * std::sqrt(2.0 * sigma_sq);
  double lo = std::max(0.0, m - width);
  double hi = std::min(cutoff, m + width);
  if (lo >= hi) {  // gaussian centred outside the disc; keep the boundary sliver
    lo = std::max(0.0, cutoff - width);
    hi = cutoff;
    if (lo >= hi) return {};
  }
  const double inv_two_sq = 1.0 / (2.0 * sigma_sq);
  const double norm = 1.0 / (2.0 * kPi * sigma_sq);
  auto radial = [&](double r) -> Vec6 {
    auto angular = [&](double theta) -> Vec6 {
      const double x = r * std::cos(theta);
      const double y = r * std::sin(theta);
      const double d2 = r * r + m * m - 2.0 * r * m * std::cos(theta - phi);
      return std::exp(-d2 * inv_two_sq) * weights_at(x, y);
    };
    return (r * norm) * periodic_trapezoid(angular, 1e-12);
  };
  const Vec6 raw = integrate_split(radial, lo, hi, {m}, tol);
  return finish_part(log_prefactor, raw);
}

// Q-function mass outside the radial cutoff, with the leading exponential
// pulled out so far tails stay representable.
WeightedPart outside_moments_radial(std::complex<double> alpha0, double cutoff,
                                    double tol) {
  const double a = std::abs(alpha0);
  const double phi = (a > 0.0) ? std::arg(alpha0) : 0.0;
  const double shift = (a < cutoff) ? (cutoff - a) * (cutoff - a) : 0.0;
  if (shift > 700.0) return {};  // below double range relative to any inside part
  const double hi = std::max(cutoff, a) + 10.0;
  auto radial = [&](double r) -> Vec6 {
    auto angular = [&](double theta) -> Vec6 {
      const double x = r * std::cos(theta);
      const double y = r * std::sin(theta);
      const double d2 = r * r + a * a - 2.0 * r * a * std::cos(theta - phi);
      return std::exp(shift - d2) * weights_at(x, y);
    };
    return (r / kPi) * periodic_trapezoid(angular, 1e-12);
  };
  const Vec6 raw = integrate_split(radial, cutoff, hi, {a}, tol);
  return finish_part(-shift, raw);
}

// One-dimensional moments of a normal density with variance 1/2 over an
// interval; erfc keeps far tails accurate.
struct Moments1D {
  double m0, m1, m2;
};

Moments1D normal_half_moments(double mu, double a, double b) {
  // density q(t) = exp(-(t-mu)^2)/sqrt(pi), variance 1/2
  const double za = a - mu;
  const double zb = b - mu;
  const double inf = std::numeric_limits<double>::infinity();
  auto q = [&](double z) {
    return std::isfinite(z) ? std::exp(-z * z) / std::sqrt(kPi) : 0.0;
  };
  double m0;
  if (!std::isfinite(zb)) {
    m0 = 0.5 * std::erfc(za);
  } else if (!std::isfinite(za) || za == -inf) {
    m0 = 0.5 * std::erfc(-zb);
  } else if (za >= 0.0) {
    m0 = 0.5 * (std::erfc(za) - std::erfc(zb));
  } else if (zb <= 0.0) {
    m0 = 0.5 * (std::erfc(-zb) - std::erfc(-za));
  } else {
    m0 = 0.5 * (std::erf(zb) - std::erf(za));
  }
  const double qa = q(za), qb = q(zb);
  const double m1 = mu * m0 - 0.5 * (qb - qa);
  const double bterm = std::isfinite(zb) ? (b + mu) * qb : 0.0;
  const double aterm = std::isfinite(za) ? (a + mu) * qa : 0.0;
  const double m2 = (mu * mu + 0.5) * m0 - 0.5 * (bterm - aterm);
  return {m0, m1, m2};
}

Vec6 product_moments(const Moments1D& mx, const Moments1D& my) {
  return {mx.m0 * my.m0, mx.m1 * my.m0, mx.m0 * my.m1,
          mx.m2 * my.m0, mx.m0 * my.m2, mx.m1 * my.m1};
}

// Rectangular geometry: gaussian moments inside [-cx, cx] x [-cy, cy] by
// nested cartesian quadrature.
WeightedPart inside_moments_rect(std::complex<double> mu, double sigma_sq, double cx,
                                 double cy, double log_prefactor, double tol) {
  if (cx <= 0.0 || cy <= 0.0) return {};
  const double width = 9.5 * std::sqrt(2.0 * sigma_sq);
  const double xlo = std::max(-cx, mu.real() - width);
  const double xhi = std::min(cx, mu.real() + width);
  const double ylo = std::max(-cy, mu.imag() - width);
  const double yhi = std::min(cy, mu.imag() + width);
  if (xlo >= xhi || ylo >= yhi) return {};
  const double inv_two_sq = 1.0 / (2.0 * sigma_sq);
  const double norm = 1.0 / (2.0 * kPi * sigma_sq);
  auto outer = [&](double x) -> Vec6 {
    const double gx = std::exp(-(x - mu.real()) * (x - mu.real()) * inv_two_sq);
    auto inner = [&](double y) -> Vec6 {
      const double gy = std::exp(-(y - mu.imag()) * (y - mu.imag()) * inv_two_sq);
      return (gx * gy) * weights_at(x, y);
    };
    return norm * integrate_split(inner, ylo, yhi, {mu.imag()}, tol);
  };
  const Vec6 raw = integrate_split(outer, xlo, xhi, {mu.real()}, tol);
  return finish_part(log_prefactor, raw);
}

// Q mass outside the rectangle, assembled from closed-form strip moments.
WeightedPart outside_moments_rect(std::complex<double> alpha0, double cx, double cy) {
  const double inf = std::numeric_limits<double>::infinity();
  const double x0 = alpha0.real(), y0 = alpha0.imag();
  const Moments1D x_left = normal_half_moments(x0, -inf, -cx);
  const Moments1D x_right = normal_half_moments(x0, cx, inf);
  const Moments1D x_mid = normal_half_moments(x0, -cx, cx);
  const Moments1D y_full = normal_half_moments(y0, -inf, inf);
  const Moments1D y_low = normal_half_moments(y0, -inf, -cy);
  const Moments1D y_high = normal_half_moments(y0, cy, inf);

  Vec6 raw = product_moments(x_left, y_full);
  raw = raw + product_moments(x_right, y_full);
  raw = raw + product_moments(x_mid, y_low);
  raw = raw + product_moments(x_mid, y_high);
  return finish_part(0.0, raw);
}

FilterMoments combine_parts(const WeightedPart& in, const WeightedPart& out,
                            std::complex<double> alpha0) {
  FilterMoments fm;
  if (in.empty && out.empty) {  // cutoff region covers nothing measurable
    fm.probability = 1.0;
    fm.mean = alpha0;
    return fm;
  }
  double w_in = 0.0, w_out = 0.0;
  if (in.empty) {
    w_out = 1.0;
  } else if (out.empty) {
    w_in = 1.0;
  } else if (in.log_scale >= out.log_scale) {
    w_in = 1.0 / (1.0 + std::exp(out.log_scale - in.log_scale));
    w_out = 1.0 - w_in;
  } else {
    w_out = 1.0 / (1.0 + std::exp(in.log_scale - out.log_scale));
    w_in = 1.0 - w_out;
  }
  Vec6 mom{};
  if (!in.empty) mom = mom + w_in * in.moments;
  if (!out.empty) mom = mom + w_out * out.moments;

  double prob = 0.0;
  if (!in.empty) prob += std::exp(in.log_scale);
  if (!out.empty) prob += std::exp(out.log_scale);

  fm.probability = std::min(prob, 1.0);
  fm.mean = {mom[1], mom[2]};
  fm.var_re = mom[3] - mom[1] * mom[1];
  fm.var_im = mom[4] - mom[2] * mom[2];
  fm.cov = mom[5] - mom[1] * mom[2];
  return fm;
}

}  // namespace

double GainSet::lambda_ff() const { return g_xp / std::sqrt(2.0); }

GainSet derive_gains(int n_clones, double t_s) {
  if (n_clones < 1) throw std::invalid_argument("derive_gains: n_clones must be >= 1");
  if (!std::isfinite(t_s) || t_s <= 0.0) {
    throw std::invalid_argument("derive_gains: t_s must be positive");
  }
  if (t_s >= 1.0) throw std::invalid_argument("derive_gains: t_s must be < 1");
  const double boundary = 1.0 / static_cast<double>(n_clones);
  if (t_s < boundary - kBoundarySlack) {
    throw RegimeError("derive_gains: t_s below 1/n_clones; hybrid operation requires g_NLA >= 1");
  }
  GainSet g;
  g.n_clones = n_clones;
  g.t_s = t_s;
  g.g_dla = std::pow(static_cast<double>(n_clones) / t_s, 0.25);
  g.g_nla = std::sqrt(t_s) * g.g_dla;
  const double gd2 = g.g_dla * g.g_dla;
  g.g_nla_prime = std::sqrt(t_s * (gd2 - 1.0) / (1.0 - t_s));
  g.g_xp = std::sqrt(2.0 * (1.0 / t_s - 1.0));
  g.g_total = g.g_nla * g.g_dla / std::sqrt(static_cast<double>(n_clones));
  return g;
}

CloneMoments clone_moments_ideal(const GainSet& gains, const Quadratures& alpha_in) {
  const double gd2 = gains.g_dla * gains.g_dla;
  CloneMoments m;
  m.mean = alpha_in;
  m.variance_x = 1.0 + 2.0 * (gd2 - 1.0) / gains.n_clones;
  m.variance_p = m.variance_x;
  m.n_clones = gains.n_clones;
  return m;
}

CloneMoments equivalent_concatenation_moments(const GainSet& gains,
                                              const Quadratures& alpha_in) {
  if (gains.g_nla < 1.0 - kBoundarySlack || gains.g_nla > gains.g_dla) {
    throw RegimeError("equivalent_concatenation_moments: gains outside hybrid regime");
  }
  const double n = gains.n_clones;
  // noiseless stage: mean scales, coherent state stays coherent
  double mx = gains.g_nla * alpha_in.x;
  double mp = gains.g_nla * alpha_in.p;
  double var = 1.0;
  // deterministic stage: mean gain g_dla, 2(g_dla^2 - 1) added noise
  const double gd2 = gains.g_dla * gains.g_dla;
  mx *= gains.g_dla;
  mp *= gains.g_dla;
  var = var + 2.0 * (gd2 - 1.0);
  // balanced N-port split: amplitude /sqrt(N), N-1 vacua admixed
  mx /= std::sqrt(n);
  mp /= std::sqrt(n);
  var = var / n + (n - 1.0) / n;

  CloneMoments m;
  m.mean = {mx, mp};
  m.variance_x = var;
  m.variance_p = var;
  m.n_clones = gains.n_clones;
  return m;
}

double fidelity_unity(int n_clones, double t_s) {
  const GainSet g = derive_gains(n_clones, t_s);
  const double gd2 = g.g_dla * g.g_dla;
  return 1.0 / (1.0 + (gd2 - 1.0) / n_clones);
}

double fidelity_nonunity(int n_clones, double g_dla, double g_total,
                         const Quadratures& alpha_in) {
  if (n_clones < 1) throw std::invalid_argument("fidelity_nonunity: n_clones must be >= 1");
  if (!(g_dla >= 1.0)) throw std::invalid_argument("fidelity_nonunity: g_dla must be >= 1");
  if (!(g_total > 0.0)) throw std::invalid_argument("fidelity_nonunity: g_total must be > 0");
  const double s = 1.0 + (g_dla * g_dla - 1.0) / n_clones;
  const double alpha_sq = quad_abs_sq(alpha_in) / 4.0;
  const double dg = g_total - 1.0;
  return (1.0 / s) * std::exp(-dg * dg * alpha_sq / s);
}

double no_cloning_limit(int n_clones) {
  if (n_clones < 1) throw std::invalid_argument("no_cloning_limit: n_clones must be >= 1");
  return static_cast<double>(n_clones) / (2.0 * n_clones - 1.0);
}

double fidelity_max(int n_clones) {
  if (n_clones < 1) throw std::invalid_argument("fidelity_max: n_clones must be >= 1");
  const double n = n_clones;
  return 1.0 / (1.0 + (std::sqrt(n) - 1.0) / n);
}

FilterMoments postfilter_moments(std::complex<double> alpha0,
                                 const HeraldingFilter& filter) {
  if (!std::isfinite(alpha0.real()) || !std::isfinite(alpha0.imag())) {
    throw std::invalid_argument("postfilter_moments: non-finite amplitude");
  }
  if (filter.g_prime == 1.0) {
    // trivial filter, outcome distribution is the bare Q function
    FilterMoments fm;
    fm.probability = 1.0;
    fm.mean = alpha0;
    fm.var_re = 0.5;
    fm.var_im = 0.5;
    return fm;
  }
  const double gp2 = filter.g_prime * filter.g_prime;
  const double k = 1.0 - 1.0 / gp2;
  const double c2 = filter.cutoff * filter.cutoff;
  // inside the cutoff: p_F * Q = A * N(g'^2 alpha0, g'^2/2 per component)
  const double log_a = std::log(gp2) + (gp2 - 1.0) * std::norm(alpha0) - c2 * k;
  const std::complex<double> mu = gp2 * alpha0;
  const double sigma_sq = 0.5 * gp2;
  const double tol = 1e-10;

  WeightedPart in, out;
  if (filter.geometry == CutoffGeometry::kRadial) {
    in = inside_moments_radial(mu, sigma_sq, filter.cutoff, log_a, tol);
    out = outside_moments_radial(alpha0, filter.cutoff, tol);
  } else {
    in = inside_moments_rect(mu, sigma_sq, filter.cutoff_re, filter.cutoff_im, log_a, tol);
    out = outside_moments_rect(alpha0, filter.cutoff_re, filter.cutoff_im);
  }
  return combine_parts(in, out, alpha0);
}

double success_probability(std::complex<double> alpha0, const HeraldingFilter& filter) {
  return postfilter_moments(alpha0, filter).probability;
}

RunPrediction predict_run(const GainSet& gains, std::complex<double> alpha_in,
                          double eta_dh, const HeraldingFilter& filter,
                          double port_transmission) {
  const std::complex<double> alpha0 =
      std::sqrt(eta_dh) * std::sqrt(1.0 - gains.t_s) * alpha_in;
  const FilterMoments fm = postfilter_moments(alpha0, filter);
  const double lambda = gains.lambda_ff();
  const std::complex<double> pre_split =
      std::sqrt(gains.t_s) * alpha_in + lambda * fm.mean;
  const double root_p = std::sqrt(port_transmission);

  RunPrediction pred;
  pred.acceptance = fm.probability;
  pred.mean_x = 2.0 * root_p * pre_split.real();
  pred.mean_p = 2.0 * root_p * pre_split.imag();
  pred.var_x = 1.0 + 4.0 * port_transmission * lambda * lambda * fm.var_re;
  pred.var_p = 1.0 + 4.0 * port_transmission * lambda * lambda * fm.var_im;

  GaussianState clone;
  clone.mean = {pred.mean_x, pred.mean_p};
  clone.cov = {pred.var_x, 0.0, pred.var_p};
  pred.fidelity =
      fidelity_gaussian(coherent(alpha_in.real(), alpha_in.imag()), clone);
  return pred;
}

}  // namespace hcm
