#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace hcm {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Each
// (seed, stream, shot) triple owns an independent stream, so shot-level
// results do not depend on worker count or scheduling.
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t shot_index, std::uint32_t stream_tag)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        base_{0u, stream_tag, static_cast<std::uint32_t>(shot_index),
              static_cast<std::uint32_t>(shot_index >> 32)} {}

  static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& ctr,
                                            const std::array<std::uint32_t, 2>& key) {
    std::array<std::uint32_t, 4> c = ctr;
    std::array<std::uint32_t, 2> k = key;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
      k[0] += kW0;
      k[1] += kW1;
    }
    return c;
  }

  // uniform double in [0, 1) with 53 random bits
  double uniform() {
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(next_word()) |
         (static_cast<std::uint64_t>(next_word()) << 32)) >>
        11;
    return static_cast<double>(bits) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; one spare value is cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    // shift u1 away from 0 so the log stays finite
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  std::uint32_t next_word() {
    if (word_pos_ == 4) {
      auto ctr = base_;
      ctr[0] = block_index_++;
      buffer_ = block(ctr, key_);
      word_pos_ = 0;
    }
    return buffer_[word_pos_++];
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> base_;
  std::array<std::uint32_t, 4> buffer_{};
  std::uint32_t block_index_ = 0;
  int word_pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hcm
