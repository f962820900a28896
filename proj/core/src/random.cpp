#include "ccembed/random.hpp"

#include <boost/math/distributions/normal.hpp>

namespace ccembed {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

double Stream::uniform() noexcept {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Stream::open_uniform() noexcept {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::uniform(double low, double high) noexcept {
  return low + (high - low) * uniform();
}

double Stream::normal() {
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, open_uniform());
}

}  // namespace ccembed
