#include "hcm/gaussian.hpp"

#include <cmath>
#include <random>

#include "doctest.h"

using namespace hcm;

namespace {

double rand_in(std::mt19937& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

}  // namespace

TEST_CASE("coherent states") {
  const GaussianState vac = coherent(0.0, 0.0);
  CHECK(vac.mean.x == 0.0);
  CHECK(vac.mean.p == 0.0);
  CHECK(vac.cov.xx == 1.0);
  CHECK(vac.cov.pp == 1.0);
  CHECK(vac.cov.xp == 0.0);

  const GaussianState s = coherent(1.115, 1.095);
  CHECK(s.mean.x == doctest::Approx(2.23).epsilon(1e-12));
  CHECK(s.mean.p == doctest::Approx(2.19).epsilon(1e-12));

  const GaussianState neg = coherent(-2.63, -0.01);
  CHECK(neg.mean.x == doctest::Approx(-5.26).epsilon(1e-12));
  CHECK(neg.mean.p == doctest::Approx(-0.02).epsilon(1e-12));

  CHECK_THROWS_AS(coherent(std::nan(""), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(coherent(0.0, std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
}

TEST_CASE("beamsplitter on means and covariances") {
  const GaussianState a = coherent(1.0, 0.0);
  const GaussianState vac = vacuum();

  auto [t1, t2] = beamsplitter_pair(a, vac, 1.0);
  CHECK(t1.mean.x == doctest::Approx(2.0));
  CHECK(t2.mean.x == doctest::Approx(0.0));

  auto [o1, o2] = beamsplitter_pair(a, vac, 0.6);
  CHECK(o1.mean.x == doctest::Approx(2.0 * std::sqrt(0.6)).epsilon(1e-12));
  CHECK(o2.mean.x == doctest::Approx(2.0 * std::sqrt(0.4)).epsilon(1e-12));
  CHECK(o1.cov.xx == doctest::Approx(1.0));
  CHECK(o2.cov.pp == doctest::Approx(1.0));

  auto [v1, v2] = beamsplitter_pair(vacuum(), vacuum(), 0.5);
  CHECK(v1.mean.x == 0.0);
  CHECK(v1.cov.xx == doctest::Approx(1.0));
  CHECK(v2.cov.pp == doctest::Approx(1.0));

  CHECK_THROWS_AS(beamsplitter_pair(a, vac, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(beamsplitter_pair(a, vac, 1.1), std::invalid_argument);
}

TEST_CASE("beamsplitter properties: involution, energy, coherent factorisation") {
  std::mt19937 gen(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const GaussianState a = coherent(rand_in(gen, -2, 2), rand_in(gen, -2, 2));
    const GaussianState b = coherent(rand_in(gen, -2, 2), rand_in(gen, -2, 2));
    const double T = rand_in(gen, 0.0, 1.0);

    auto [o1, o2] = beamsplitter_pair(a, b, T);
    // coherent inputs factorise: both outputs stay at vacuum noise
    CHECK(o1.cov.xx == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(o2.cov.xx == doctest::Approx(1.0).epsilon(1e-12));

    // the map is its own inverse
    auto [r1, r2] = beamsplitter_pair(o1, o2, T);
    CHECK(r1.mean.x == doctest::Approx(a.mean.x).epsilon(1e-10));
    CHECK(r1.mean.p == doctest::Approx(a.mean.p).epsilon(1e-10));
    CHECK(r2.mean.x == doctest::Approx(b.mean.x).epsilon(1e-10));
    CHECK(r2.mean.p == doctest::Approx(b.mean.p).epsilon(1e-10));
    CHECK(r1.cov.xx == doctest::Approx(a.cov.xx).epsilon(1e-10));

    // energy conservation on the means
    const double in = quad_abs_sq(a.mean) + quad_abs_sq(b.mean);
    const double out = quad_abs_sq(o1.mean) + quad_abs_sq(o2.mean);
    CHECK(out == doctest::Approx(in).epsilon(1e-10));
  }
}

TEST_CASE("loss channel") {
  const GaussianState s = coherent(1.0, 0.0);
  const GaussianState same = loss_channel(s, 1.0);
  CHECK(same.mean.x == s.mean.x);
  CHECK(same.cov.xx == s.cov.xx);

  const GaussianState lossy = loss_channel(s, 0.9);
  CHECK(lossy.mean.x == doctest::Approx(2.0 * std::sqrt(0.9)).epsilon(1e-12));
  CHECK(lossy.cov.xx == doctest::Approx(1.0).epsilon(1e-12));

  GaussianState hot = vacuum();
  hot.cov = {3.0, 0.0, 3.0};
  const GaussianState cooled = loss_channel(hot, 0.5);
  CHECK(cooled.cov.xx == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(loss_channel(s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(loss_channel(s, 1.5), std::invalid_argument);

  // composition property
  std::mt19937 gen(99);
  for (int trial = 0; trial < 50; ++trial) {
    GaussianState g = coherent(rand_in(gen, -1, 1), rand_in(gen, -1, 1));
    g.cov = {rand_in(gen, 1.0, 4.0), 0.0, rand_in(gen, 1.0, 4.0)};
    const double e1 = rand_in(gen, 0.2, 1.0), e2 = rand_in(gen, 0.2, 1.0);
    const GaussianState two = loss_channel(loss_channel(g, e1), e2);
    const GaussianState one = loss_channel(g, e1 * e2);
    CHECK(two.mean.x == doctest::Approx(one.mean.x).epsilon(1e-12));
    CHECK(two.cov.xx == doctest::Approx(one.cov.xx).epsilon(1e-12));
    CHECK(two.cov.pp == doctest::Approx(one.cov.pp).epsilon(1e-12));
  }
}

TEST_CASE("displacement") {
  const GaussianState still = displace(vacuum(), 0.0, 0.0);
  CHECK(still.mean.x == 0.0);

  const GaussianState d = displace(vacuum(), 2.0, 0.0);
  const GaussianState c = coherent(1.0, 0.0);
  CHECK(d.mean.x == c.mean.x);
  CHECK(d.cov.xx == c.cov.xx);

  GaussianState wide = vacuum();
  wide.cov = {2.0, 0.0, 2.0};
  const GaussianState moved = displace(wide, 1.0, -1.0);
  CHECK(moved.cov.xx == 2.0);
  CHECK(moved.mean.x == 1.0);
  CHECK(moved.mean.p == -1.0);
}

TEST_CASE("gaussian fidelity") {
  const GaussianState in = coherent(1.115, 1.095);
  CHECK(fidelity_gaussian(in, in) == doctest::Approx(1.0).epsilon(1e-12));

  // measure-and-prepare clone: two added vacuum units
  GaussianState mp = in;
  mp.cov = {3.0, 0.0, 3.0};
  CHECK(fidelity_gaussian(in, mp) == doctest::Approx(0.5).epsilon(1e-12));

  // unity-gain hybrid clone at N=2, T_s=0.6
  GaussianState clone = in;
  clone.cov = {1.8257418583505538, 0.0, 1.8257418583505538};
  CHECK(fidelity_gaussian(in, clone) == doctest::Approx(0.707778735729046).epsilon(1e-9));

  GaussianState bad = in;
  bad.cov = {0.5, 0.0, 0.5};
  CHECK_THROWS_AS(fidelity_gaussian(in, bad), std::invalid_argument);
}

TEST_CASE("fidelity properties: symmetry and coherent overlap") {
  std::mt19937 gen(7);
  for (int trial = 0; trial < 100; ++trial) {
    GaussianState a = coherent(rand_in(gen, -2, 2), rand_in(gen, -2, 2));
    GaussianState b = coherent(rand_in(gen, -2, 2), rand_in(gen, -2, 2));

    // overlap of two coherent states
    const double dre = (b.mean.x - a.mean.x) / 2.0;
    const double dim = (b.mean.p - a.mean.p) / 2.0;
    const double expected = std::exp(-(dre * dre + dim * dim));
    CHECK(fidelity_gaussian(a, b) == doctest::Approx(expected).epsilon(1e-10));

    a.cov = {rand_in(gen, 1.0, 3.0), 0.0, rand_in(gen, 1.0, 3.0)};
    b.cov = {rand_in(gen, 1.0, 3.0), 0.0, rand_in(gen, 1.0, 3.0)};
    CHECK(fidelity_gaussian(a, b) ==
          doctest::Approx(fidelity_gaussian(b, a)).epsilon(1e-12));
    CHECK(fidelity_gaussian(a, b) <= 1.0 + 1e-12);
    if (trial % 10 == 0) {
      CHECK(fidelity_gaussian(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("wigner grid") {
  const auto xs = linspace(-6.0, 6.0, 201);
  const auto ps = linspace(-6.0, 6.0, 201);

  const WignerGrid vac = wigner(vacuum(), xs, ps);
  const double peak = 1.0 / (2.0 * std::acos(-1.0));
  double maxval = 0.0, sum = 0.0;
  for (double v : vac.values) {
    CHECK(v >= 0.0);
    maxval = std::max(maxval, v);
    sum += v;
  }
  const double cell = (xs[1] - xs[0]) * (ps[1] - ps[0]);
  CHECK(maxval == doctest::Approx(peak).epsilon(1e-3));
  CHECK(sum * cell == doctest::Approx(1.0).epsilon(0.01));

  // displaced state peaks at the grid cell nearest its mean
  const WignerGrid disp = wigner(coherent(1.0, -0.5), xs, ps);
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < disp.values.size(); ++i) {
    if (disp.values[i] > disp.values[argmax]) argmax = i;
  }
  const double bx = disp.x_axis[argmax / disp.p_axis.size()];
  const double bp = disp.p_axis[argmax % disp.p_axis.size()];
  CHECK(std::abs(bx - 2.0) <= (xs[1] - xs[0]) / 2 + 1e-12);
  CHECK(std::abs(bp - (-1.0)) <= (ps[1] - ps[0]) / 2 + 1e-12);

  // doubling the covariance halves the peak
  GaussianState wide = vacuum();
  wide.cov = {2.0, 0.0, 2.0};
  const WignerGrid w2 = wigner(wide, xs, ps);
  double max2 = 0.0, sum2 = 0.0;
  for (double v : w2.values) {
    max2 = std::max(max2, v);
    sum2 += v;
  }
  CHECK(max2 == doctest::Approx(0.5 * peak).epsilon(1e-3));
  CHECK(sum2 * cell == doctest::Approx(1.0).epsilon(0.01));

  CHECK_THROWS_AS(wigner(vacuum(), {0.0, -1.0, 1.0}, ps), std::invalid_argument);
}
