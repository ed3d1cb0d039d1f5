#pragma once

#include <array>
#include <cstdint>

namespace chaoskit {

// Counter-based random number generation. Every draw is a pure function of
// (master seed, lane, particle, step, component), so a given counter always
// yields the same value no matter which simulation asks for it, in what
// order, or on which thread. That is what makes coupling across particle
// counts and step sizes hold by construction.

inline constexpr std::uint32_t lane_brownian = 0;
inline constexpr std::uint32_t lane_initial = 1;

/// One Philox4x32-10 block: 4 counter words, 2 key words -> 4 output words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Inverse of the standard normal CDF (Wichura's AS241, double precision).
/// Requires p in (0,1).
double inverse_normal_cdf(double p);

/// Uniform double in the open interval (0,1) from one counter.
double uniform01(std::uint64_t seed, std::uint32_t lane, std::uint32_t particle,
                 std::uint32_t step, std::uint32_t component);

/// Standard normal draw at one counter, via inverse-CDF of uniform01.
double standard_normal(std::uint64_t seed, std::uint32_t lane, std::uint32_t particle,
                       std::uint32_t step, std::uint32_t component);

/// Sequential N(0,1) draws from one particle's initial-condition lane.
class NormalStream {
  public:
    NormalStream(std::uint64_t seed, std::uint32_t particle)
        : seed_(seed), particle_(particle) {}

    double next() {
        return standard_normal(seed_, lane_initial, particle_, 0, counter_++);
    }

  private:
    std::uint64_t seed_;
    std::uint32_t particle_;
    std::uint32_t counter_ = 0;
};

}  // namespace chaoskit
