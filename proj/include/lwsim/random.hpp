// Copyright 2026 The lwsim Authors
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

// Counter-based random numbers.
//
// Every draw is a pure function of a 64-bit key and a 128-bit counter, using
// the Philox4x32-10 bijection. Two interfaces are built on top of it:
//
//  * CounterRng: a sequential UniformRandomBitGenerator for code that consumes
//    an unknown number of variates (graph generators, tree samplers).
//  * NoiseDraw: the per-(vertex label, step) noise used by the particle
//    engines. Because the draw for (seed, label, step, index) never depends on
//    what other vertices consumed, simulations are reproducible under any
//    scheduling, and replacing the noise of a vertex subset leaves the other
//    streams bitwise intact.
#ifndef LWSIM_RANDOM_HPP_
#define LWSIM_RANDOM_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <utility>

namespace lwsim {

using Seed = std::uint64_t;

namespace philox {

inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

using Counter = std::array<std::uint32_t, 4>;

inline Counter Round(const Counter& c, std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  return {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
}

// Philox4x32 with 10 rounds.
inline Counter Block(Counter c, std::uint64_t key) {
  auto k0 = static_cast<std::uint32_t>(key);
  auto k1 = static_cast<std::uint32_t>(key >> 32);
  for (int r = 0; r < 10; ++r) {
    c = Round(c, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return c;
}

}  // namespace philox

// SplitMix64 finalizer; used to derive independent child seeds.
inline std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Child seed for sub-stream `a` (and optionally `b`) of `seed`.
inline Seed DeriveSeed(Seed seed, std::uint64_t a, std::uint64_t b = 0) {
  return Mix64(Mix64(seed ^ Mix64(a + 0x632BE59BD9B4E019ull)) ^
               Mix64(b + 0x8CB92BA72F3D8DD7ull));
}

// 53-bit uniform in [0, 1).
inline double ToUnit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

// Box-Muller on two uniforms; u1 is mapped into (0, 1].
inline std::pair<double, double> BoxMuller(double u1, double u2) {
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(Seed seed, std::uint64_t stream = 0)
      : key_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (pos_ >= 4) Refill();
    const std::uint64_t hi = buffer_[pos_];
    const std::uint64_t lo = buffer_[pos_ + 1];
    pos_ += 2;
    return (hi << 32) | lo;
  }

  double Uniform() {
    const std::uint64_t x = (*this)();
    return static_cast<double>(x >> 11) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n); n must be positive.
  std::uint64_t UniformInt(std::uint64_t n) {
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = (*this)();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = (*this)();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  double Normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = Uniform();
    const double u2 = Uniform();
    const auto [z0, z1] = BoxMuller(u1, u2);
    spare_ = z1;
    has_spare_ = true;
    return z0;
  }

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = UniformInt(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  void Refill() {
    const philox::Counter c{static_cast<std::uint32_t>(counter_),
                            static_cast<std::uint32_t>(counter_ >> 32),
                            static_cast<std::uint32_t>(stream_),
                            static_cast<std::uint32_t>(stream_ >> 32)};
    buffer_ = philox::Block(c, key_);
    ++counter_;
    pos_ = 0;
  }

  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  philox::Counter buffer_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Identifies one vertex's noise stream: the stream seed plus a label. By
// default the label is the vertex index; relabelling lets a simulation hand a
// vertex the noise that another vertex would have seen.
struct NoiseKey {
  Seed seed = 0;
  std::uint64_t label = 0;

  friend bool operator==(const NoiseKey&, const NoiseKey&) = default;
};

// Noise available to one vertex at one step. Draw i is a pure function of
// (key, step, i).
class NoiseDraw {
 public:
  NoiseDraw(NoiseKey key, std::uint32_t step) : key_(key), step_(step) {}

  // i-th uniform in [0, 1).
  double Uniform(std::uint32_t i = 0) const {
    const auto block = Block(i / 2);
    const std::size_t o = 2 * (i % 2);
    return ToUnit(block[o], block[o + 1]);
  }

  // i-th standard normal. Pairs (2j, 2j+1) share one Box-Muller transform.
  double Normal(std::uint32_t i = 0) const {
    const auto block = Block(0x80000000u | (i / 2));
    const auto [z0, z1] =
        BoxMuller(ToUnit(block[0], block[1]), ToUnit(block[2], block[3]));
    return (i % 2 == 0) ? z0 : z1;
  }

  NoiseKey key() const { return key_; }
  std::uint32_t step() const { return step_; }

 private:
  philox::Counter Block(std::uint32_t index) const {
    const philox::Counter c{static_cast<std::uint32_t>(key_.label),
                            static_cast<std::uint32_t>(key_.label >> 32),
                            step_, index};
    return philox::Block(c, key_.seed);
  }

  NoiseKey key_;
  std::uint32_t step_;
};

}  // namespace lwsim

#endif  // LWSIM_RANDOM_HPP_
