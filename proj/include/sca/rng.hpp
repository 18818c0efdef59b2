#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. 2011).
//
// Every draw is a pure function of (seed, step, slot, stream), so a
// synchronous update can hand vertex x the uniforms at slot x regardless of
// which thread processes it, and two coupled chains can share a stream by
// reusing the same key.

#include <array>
#include <cstdint>

namespace sca {

namespace detail {

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace detail

using PhiloxBlock = std::array<std::uint32_t, 4>;

inline PhiloxBlock philox4x32_10(PhiloxBlock ctr, std::array<std::uint32_t, 2> key) noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    detail::mulhilo32(kMul0, ctr[0], hi0, lo0);
    detail::mulhilo32(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

// Maps 64 random bits to the open interval (0, 1) with 52-bit resolution.
// 53 bits would round the top value up to exactly 1.
inline double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// Named streams keep draws for different purposes independent.
enum class Stream : std::uint32_t {
  kVertexUpdate = 0,
  kInitialState = 1,
  kGlauber = 2,
  kBinomialSubset = 3,
  kGenerator = 4,
};

class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t seed = 0) noexcept : seed_(seed) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }

  // Two independent uniforms on (0, 1) addressed by (step, slot, stream).
  std::array<double, 2> uniforms(std::uint64_t step, std::uint32_t slot, Stream stream) const noexcept {
    const PhiloxBlock ctr = {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), slot,
                             static_cast<std::uint32_t>(stream)};
    const PhiloxBlock out =
        philox4x32_10(ctr, {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    return {to_open_unit(a), to_open_unit(b)};
  }

  double uniform(std::uint64_t step, std::uint32_t slot, Stream stream) const noexcept {
    return uniforms(step, slot, stream)[0];
  }

 private:
  std::uint64_t seed_;
};

}  // namespace sca
