#include "uncertainty/random.hpp"

#include <cmath>
#include <numbers>

namespace uncertainty {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RandomStream RandomStream::split(std::uint64_t stream_id) const {
  return RandomStream(splitmix64(seed_ ^ splitmix64(stream_id + 1)));
}

double RandomStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RandomStream::uniform_open_zero() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

std::pair<double, double> RandomStream::normal_pair() {
  const double u1 = uniform_open_zero();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace uncertainty
