// Copyright 2026 The socialgen Authors
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

#ifndef SOCIALGEN_RNG_HPP_
#define SOCIALGEN_RNG_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

namespace socialgen {

/// splitmix64 step. Used both as the generator core and to derive substream
/// seeds; output is fully determined by the state word, so streams indexed by
/// (seed, tags...) are reproducible across platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a substream seed from a base seed and up to four stream tags.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a = 0,
                              std::uint64_t b = 0, std::uint64_t c = 0,
                              std::uint64_t d = 0) {
  std::uint64_t s = seed;
  std::uint64_t out = splitmix64(s);
  s ^= a;
  out ^= splitmix64(s);
  s ^= b;
  out ^= splitmix64(s);
  s ^= c;
  out ^= splitmix64(s);
  s ^= d;
  out ^= splitmix64(s);
  return out;
}

/// Deterministic PRNG. Not an std engine on purpose: std distributions are
/// implementation-defined, and the sampler's byte-reproducibility contract
/// needs the exact draw sequence pinned down.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1].
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller. Two uniforms per draw, no cached spare,
  /// so the consumed stream length per call is fixed.
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Eigen::VectorXd normals(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

private:
  std::uint64_t state_;
};

}  // namespace socialgen

#endif  // SOCIALGEN_RNG_HPP_
