#include "hcm/filter.hpp"

#include <cmath>
#include <stdexcept>

#include "hcm/errors.hpp"

namespace hcm {

std::string to_string(CutoffGeometry g) {
  return g == CutoffGeometry::kRadial ? "radial" : "rect";
}

CutoffGeometry cutoff_geometry_from_string(const std::string& name) {
  if (name == "radial") return CutoffGeometry::kRadial;
  if (name == "rect") return CutoffGeometry::kRect;
  throw std::invalid_argument("cutoff_geometry must be \"radial\" or \"rect\"");
}

double HeraldingFilter::log_norm() const {
  return cutoff * cutoff * (1.0 - 1.0 / (g_prime * g_prime));
}

double HeraldingFilter::norm_m() const { return std::exp(log_norm()); }

bool HeraldingFilter::inside(std::complex<double> alpha_m) const {
  if (geometry == CutoffGeometry::kRadial) {
    return std::norm(alpha_m) < cutoff * cutoff;
  }
  return std::abs(alpha_m.real()) < cutoff_re && std::abs(alpha_m.imag()) < cutoff_im;
}

namespace {

void check_filter_args(double g_prime, double cutoff) {
  if (!std::isfinite(g_prime) || g_prime < 1.0) {
    throw std::invalid_argument("heralding filter: g_prime must be >= 1");
  }
  if (!std::isfinite(cutoff) || cutoff < 0.0) {
    throw std::invalid_argument("heralding filter: cutoff must be >= 0");
  }
}

}  // namespace

HeraldingFilter make_filter(double g_prime, double cutoff, CutoffGeometry geometry) {
  check_filter_args(g_prime, cutoff);
  HeraldingFilter f;
  f.g_prime = g_prime;
  f.cutoff = cutoff;
  f.cutoff_re = cutoff / std::sqrt(2.0);
  f.cutoff_im = f.cutoff_re;
  f.geometry = geometry;
  return f;
}

HeraldingFilter make_filter_from_rule(double g_prime, std::complex<double> alpha_max,
                                      double beta, CutoffGeometry geometry) {
  if (!std::isfinite(g_prime) || g_prime < 1.0) {
    throw std::invalid_argument("heralding filter: g_prime must be >= 1");
  }
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw std::invalid_argument("heralding filter: beta must be > 0");
  }
  const double gp2 = g_prime * g_prime;
  const double pad = beta * std::sqrt(0.5) * g_prime;
  HeraldingFilter f;
  f.g_prime = g_prime;
  f.cutoff_re = gp2 * std::abs(alpha_max.real()) + pad;
  f.cutoff_im = gp2 * std::abs(alpha_max.imag()) + pad;
  f.cutoff = std::hypot(f.cutoff_re, f.cutoff_im);
  f.geometry = geometry;
  return f;
}

double choose_cutoff(double g_prime, std::complex<double> alpha_max, double beta) {
  return make_filter_from_rule(g_prime, alpha_max, beta).cutoff;
}

double acceptance_probability(const HeraldingFilter& filter,
                              std::complex<double> alpha_m) {
  if (!filter.inside(alpha_m)) return 1.0;
  const double k = 1.0 - 1.0 / (filter.g_prime * filter.g_prime);
  // (|a_m|^2 - cutoff^2) k <= 0, so this never overflows even when M would
  return std::exp((std::norm(alpha_m) - filter.cutoff * filter.cutoff) * k);
}

bool herald(const HeraldingFilter& filter, std::complex<double> alpha_m, double u) {
  return u < acceptance_probability(filter, alpha_m);
}

}  // namespace hcm
