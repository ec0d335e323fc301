#include "runclust/rng.hpp"

#include <cmath>
#include <limits>

#include "runclust/error.hpp"

namespace runclust {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(~stream));
}

std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("Rng::below(0)");
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::exponential(double rate) {
  return -std::log(uniform_open()) / rate;
}

int Rng::geometric(double q) {
  if (q <= 0.0) return 1;
  const double m = std::floor(std::log(uniform_open()) / std::log(q));
  if (m >= static_cast<double>(std::numeric_limits<int>::max() - 1)) {
    return std::numeric_limits<int>::max() - 1;
  }
  return 1 + static_cast<int>(m);
}

double Rng::truncated_pareto(double gamma, double lo, double hi) {
  const double a = std::pow(lo, -gamma);
  const double b = std::pow(hi, -gamma);
  const double u = uniform01();
  return std::pow(a - u * (a - b), -1.0 / gamma);
}

}  // namespace runclust
