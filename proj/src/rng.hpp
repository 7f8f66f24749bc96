#pragma once

#include <cmath>
#include <cstdint>

namespace ldplab {

// splitmix64 step, used to decorrelate (seed, stream) pairs.
inline std::uint64_t splitmix64(std::uint64_t& s) {
  std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Small deterministic RNG stream.  One stream per replication: the draw
// sequence depends only on (seed, stream_id), never on thread scheduling,
// so results are independent of the worker count.
//
// xoshiro256** core; all distribution draws consume a fixed number of
// uniforms (inverse CDF or closed-form transforms, no rejection).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL + stream_id * 0x9e3779b97f4a7c15ULL);
    for (int i = 0; i < 4; ++i) state_[i] = splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on (0, 1]; never returns 0 so that u^{-1/alpha} is finite.
  double u01() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (two uniforms, deterministic consumption).
  double gauss() {
    double u = u01();
    double v = u01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
  }

  // Student-t with nu > 0 degrees of freedom, Bailey's polar-free form:
  // exact, two uniforms per draw.
  double student_t(double nu) {
    double u = u01();
    double v = u01();
    return std::sqrt(nu * (std::pow(u, -2.0 / nu) - 1.0)) * std::cos(2.0 * M_PI * v);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace ldplab
