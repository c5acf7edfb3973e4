#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace prime {

// Seedable, splittable random stream.
//
// A stream is identified by a 64-bit key. Child streams are derived with
// Split(); the child's key depends only on the parent's key and the split
// label, so the same (seed, path of labels) always yields the same sequence
// no matter in which order siblings are created or consumed.
//
// Uniform draws use the top 53 bits of a std::mt19937_64 output, which is
// fully specified by the standard, so sequences are identical across
// platforms and standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  RandomStream Split(std::uint64_t label) const;
  RandomStream Split(std::string_view label) const;

  std::uint64_t key() const noexcept { return key_; }

  // Uniform on [0, 1).
  double Uniform();
  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t UniformIndex(std::uint64_t bound);
  // Standard exponential, via inversion of a single uniform draw.
  double Exponential();
  // Standard normal, Box-Muller on two uniform draws (no cached spare).
  double Normal();

  std::uint64_t NextBits() { return engine_(); }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive child keys.
std::uint64_t MixBits(std::uint64_t x) noexcept;

// Bit pattern of a double, for keying streams by real-valued grid coordinates.
std::uint64_t DoubleKey(double x) noexcept;

}  // namespace prime
