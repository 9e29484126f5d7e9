#include "zeno/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace zeno {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t Rng::substream_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

std::uint32_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || mean > 500.0) {
    throw std::invalid_argument("Rng::poisson: mean must lie in [0, 500]");
  }
  if (mean == 0.0) return 0;

  const double u = uniform();
  double term = std::exp(-mean);
  double cdf = term;
  std::uint32_t k = 0;
  // Past this bound the remaining tail is below double resolution.
  const auto k_max = static_cast<std::uint32_t>(mean + 40.0 * std::sqrt(mean) + 40.0);
  while (u >= cdf && k < k_max) {
    ++k;
    term *= mean / static_cast<double>(k);
    cdf += term;
  }
  return k;
}

}  // namespace zeno
