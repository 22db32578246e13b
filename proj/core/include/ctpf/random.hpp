// Copyright 2026 The ctpf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CTPF_RANDOM_HPP
#define CTPF_RANDOM_HPP

#include <array>
#include <cstdint>
#include <limits>

/**
 * \file
 * \brief Counter-based random streams.
 *
 * Every random quantity in the library is drawn from a Philox4x32-10 stream
 * identified by (master seed, domain, a, b). Streams for different particles,
 * steps or sequences never overlap, so results do not depend on the order in
 * which work is scheduled across threads.
 */

namespace ctpf {

/// Philox4x32-10 (Salmon et al., SC'11). Satisfies UniformRandomBitGenerator.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// `key` selects the generator, `stream` the 2^64-block substream.
  explicit Philox4x32(std::uint64_t key = 0, std::uint64_t stream = 0) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        counter_{0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

  result_type operator()() noexcept {
    if (index_ == 4) {
      refill();
    }
    ++draws_;
    return output_[index_++];
  }

  /// Number of 32-bit words consumed so far.
  std::uint64_t draws() const noexcept { return draws_; }

 private:
  static constexpr std::uint32_t kMulA = 0xD2511F53;
  static constexpr std::uint32_t kMulB = 0xCD9E8D57;
  static constexpr std::uint32_t kWeylA = 0x9E3779B9;
  static constexpr std::uint32_t kWeylB = 0xBB67AE85;

  void refill() noexcept {
    std::array<std::uint32_t, 4> x = counter_;
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * x[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * x[2];
      x = {static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k[1], static_cast<std::uint32_t>(p0)};
      k[0] += kWeylA;
      k[1] += kWeylB;
    }
    output_ = x;
    index_ = 0;
    if (++counter_[0] == 0) {
      ++counter_[1];
    }
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> output_{};
  int index_ = 4;
  std::uint64_t draws_ = 0;
};

/// Independent stream families. Changing how one family is consumed never
/// shifts the randomness of another.
enum class StreamDomain : std::uint64_t {
  kPropagation = 1,
  kResampling = 2,
  kPrediction = 3,
  kObservationTimes = 4,
  kSimulation = 5,
  kSeedDerivation = 6,
  kSelfTest = 7,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_id(StreamDomain domain, std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(mix64(mix64(static_cast<std::uint64_t>(domain)) ^ a) ^ mix64(b + 0x632BE59BD9B4E019ULL));
}

inline Philox4x32 make_stream(std::uint64_t seed, StreamDomain domain, std::uint64_t a, std::uint64_t b = 0) noexcept {
  return Philox4x32(seed, stream_id(domain, a, b));
}

/// Derives a child seed, e.g. one filter seed per (sequence, repetition).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(master ^ stream_id(StreamDomain::kSeedDerivation, a, b));
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Generator>
double uniform01(Generator& rng) {
  const std::uint64_t hi = static_cast<std::uint64_t>(rng()) >> 5;  // 27 bits
  const std::uint64_t lo = static_cast<std::uint64_t>(rng()) >> 6;  // 26 bits
  return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
}

}  // namespace ctpf

#endif  // CTPF_RANDOM_HPP
