#include <cmath>
#include <complex>
#include <sstream>

#include "hcm/analytic.hpp"
#include "hcm/errors.hpp"
#include "hcm/filter.hpp"

namespace hcm {

namespace {

constexpr double kGainTol = 1e-6;
constexpr double kBracketLo = 1.0;
constexpr double kBracketHi = 10.0;

}  // namespace

HeraldingFilter calibrate_gain(int n_clones, double t_s, double eta_dh,
                               const CutoffRule& rule,
                               std::complex<double> alpha_ref) {
  if (!(eta_dh > 0.0 && eta_dh <= 1.0)) {
    throw std::invalid_argument("calibrate_gain: eta_dh outside (0, 1]");
  }
  const GainSet gains = derive_gains(n_clones, t_s);
  if (alpha_ref.real() == 0.0 && alpha_ref.imag() == 0.0) {
    throw CalibrationError("calibrate_gain: mean gain undefined for zero reference amplitude");
  }

  const double root_n = std::sqrt(static_cast<double>(n_clones));
  const std::complex<double> alpha0 =
      std::sqrt(eta_dh) * std::sqrt(1.0 - t_s) * alpha_ref;
  const bool use_re = std::abs(alpha_ref.real()) >= std::abs(alpha_ref.imag());
  const double ref_component = use_re ? alpha_ref.real() : alpha_ref.imag();
  const double lambda = gains.lambda_ff();

  auto mean_gain = [&](double g_prime, HeraldingFilter* out_filter) {
    HeraldingFilter f =
        make_filter_from_rule(g_prime, rule.alpha_max, rule.beta, rule.geometry);
    const std::complex<double> post = postfilter_moments(alpha0, f).mean;
    const std::complex<double> clone_mean =
        (std::sqrt(t_s) * alpha_ref + lambda * post) / root_n;
    if (out_filter) *out_filter = f;
    const double component = use_re ? clone_mean.real() : clone_mean.imag();
    return component / ref_component;
  };

  HeraldingFilter filter;
  double lo = kBracketLo, hi = kBracketHi;
  double f_lo = mean_gain(lo, &filter) - 1.0;
  if (std::abs(f_lo) < kGainTol) return filter;
  const double f_hi = mean_gain(hi, nullptr) - 1.0;
  if (f_lo > 0.0 || f_hi < 0.0) {
    std::ostringstream msg;
    msg << "calibrate_gain: no unity-gain root in g' bracket [" << kBracketLo << ", "
        << kBracketHi << "]; mean gain is " << (1.0 + f_lo) << " at g'=" << kBracketLo
        << " and " << (1.0 + f_hi) << " at g'=" << kBracketHi;
    throw CalibrationError(msg.str());
  }

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = mean_gain(mid, &filter) - 1.0;
    if (std::abs(f_mid) < kGainTol) return filter;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-14) break;
  }
  throw CalibrationError("calibrate_gain: bisection failed to reach |gain - 1| < 1e-6");
}

}  // namespace hcm
