#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mvl {

// Standard-normal sampler with a fully specified construction (Box-Muller
// over explicit 53-bit uniforms), so streams are identical across platforms
// and toolchains for a given seed.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // open interval (0, 1)
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double operator()() {
    if (have_) {
      have_ = false;
      return cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 2.0 * 3.14159265358979323846 * uniform();
    cached_ = r * std::sin(t);
    have_ = true;
    return r * std::cos(t);
  }

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool have_ = false;
};

}  // namespace mvl
