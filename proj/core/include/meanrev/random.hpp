#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace meanrev {

// Generator name recorded in run manifests so synthetic data stays
// reproducible across toolchains.
inline constexpr const char* kGaussianRng = "mt19937_64/box-muller";

// Standard-normal stream with a platform-independent realization: 53-bit
// uniforms taken straight from mt19937_64, mapped through Box-Muller.
// std::normal_distribution is implementation-defined and unsuitable here.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  // Uniform draw in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace meanrev
