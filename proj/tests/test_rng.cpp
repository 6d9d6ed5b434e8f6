#include "hcm/rng.hpp"

#include <cmath>
#include <cstdint>

#include "doctest.h"

using namespace hcm;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // reference vectors from the Random123 distribution
  auto zeros = PhiloxStream::block({0, 0, 0, 0}, {0, 0});
  CHECK(zeros[0] == 0x6627E8D5u);
  CHECK(zeros[1] == 0xE169C58Du);
  CHECK(zeros[2] == 0xBC57AC4Cu);
  CHECK(zeros[3] == 0x9B00DBD8u);

  auto ones = PhiloxStream::block({0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu},
                                  {0xFFFFFFFFu, 0xFFFFFFFFu});
  CHECK(ones[0] == 0x408F276Du);
  CHECK(ones[1] == 0x41C83B0Eu);
  CHECK(ones[2] == 0xA20BC7C6u);
  CHECK(ones[3] == 0x6D5451FDu);

  auto pi = PhiloxStream::block({0x243F6A88u, 0x85A308D3u, 0x13198A2Eu, 0x03707344u},
                                {0xA4093822u, 0x299F31D0u});
  CHECK(pi[0] == 0xD16CFE09u);
  CHECK(pi[1] == 0x94FDCCEBu);
  CHECK(pi[2] == 0x5001E420u);
  CHECK(pi[3] == 0x24126EA1u);
}

TEST_CASE("stream layout and uniforms match the python reference") {
  // block index 7 of stream (seed=42, shot=123, tag=0)
  auto words = PhiloxStream::block({7, 0, 123, 0}, {42, 0});
  CHECK(words[0] == 0xBBB40E71u);
  CHECK(words[1] == 0xA7E4FD0Du);
  CHECK(words[2] == 0x8C762A0Cu);
  CHECK(words[3] == 0x6AD5BC01u);

  PhiloxStream s(42, 123, 0);
  // skip the first 7 blocks' worth of uniforms (2 words each)
  for (int i = 0; i < 14; ++i) s.uniform();
  CHECK(s.uniform() == doctest::Approx(0.65583783707889165).epsilon(1e-15));
  CHECK(s.uniform() == doctest::Approx(0.41732382810410995).epsilon(1e-15));
}

TEST_CASE("streams are independent and reproducible") {
  PhiloxStream a(99, 5, 1);
  PhiloxStream b(99, 5, 1);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());

  PhiloxStream c(99, 6, 1);
  PhiloxStream d(99, 5, 2);
  PhiloxStream e(100, 5, 1);
  bool all_same_c = true, all_same_d = true, all_same_e = true;
  PhiloxStream ref(99, 5, 1);
  for (int i = 0; i < 16; ++i) {
    const double r = ref.uniform();
    all_same_c &= (c.uniform() == r);
    all_same_d &= (d.uniform() == r);
    all_same_e &= (e.uniform() == r);
  }
  CHECK_FALSE(all_same_c);
  CHECK_FALSE(all_same_d);
  CHECK_FALSE(all_same_e);
}

TEST_CASE("uniform and normal sample statistics") {
  PhiloxStream s(7, 0, 0);
  const int n = 200000;
  double su = 0.0, su2 = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    su += u;
    su2 += u * u;
    const double z = s.normal();
    sn += z;
    sn2 += z * z;
  }
  const double mu = su / n;
  const double vu = su2 / n - mu * mu;
  CHECK(std::abs(mu - 0.5) < 4.0 / std::sqrt(12.0 * n));
  CHECK(vu == doctest::Approx(1.0 / 12.0).epsilon(0.02));

  const double mn = sn / n;
  const double vn = sn2 / n - mn * mn;
  CHECK(std::abs(mn) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(vn == doctest::Approx(1.0).epsilon(0.02));
}
