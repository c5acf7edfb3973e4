#include "prime/random.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "prime/error.hpp"

namespace prime {

std::uint64_t MixBits(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DoubleKey(double x) noexcept {
  // +0.0 and -0.0 name the same grid point.
  if (x == 0.0) x = 0.0;
  return std::bit_cast<std::uint64_t>(x);
}

RandomStream::RandomStream(std::uint64_t seed)
    : key_(MixBits(seed)), engine_(key_) {}

RandomStream RandomStream::Split(std::uint64_t label) const {
  RandomStream child(0);
  child.key_ = MixBits(key_ ^ MixBits(label + 0x632be59bd9b4e019ULL));
  child.engine_.seed(child.key_);
  return child;
}

RandomStream RandomStream::Split(std::string_view label) const {
  // FNV-1a; std::hash is implementation-defined.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return Split(h);
}

double RandomStream::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::UniformIndex(std::uint64_t bound) {
  if (bound == 0) {
    throw Error(ErrorCode::kInvalidParameters, "UniformIndex bound must be positive");
  }
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

double RandomStream::Exponential() { return -std::log1p(-Uniform()); }

double RandomStream::Normal() {
  const double u1 = 1.0 - Uniform();  // (0, 1]
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace prime
