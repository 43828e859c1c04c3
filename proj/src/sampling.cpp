#include "scencert/sampling.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "scencert/errors.hpp"

namespace scencert {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer: the standard counter-based output stage
std::uint64_t mix(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

SeededStream::SeededStream(std::uint64_t seed, std::string_view space) {
  seed_ = seed;
  space_ = std::string(space);
  key_ = mix(seed ^ mix(fnv1a(space)));
}

SeededStream SeededStream::derive(std::string_view label,
                                  std::uint64_t index) const {
  SeededStream child;
  child.seed_ = seed_;
  child.space_ = space_ + "/" + std::string(label) + "[" + std::to_string(index) + "]";
  child.key_ = mix(key_ ^ mix(fnv1a(label) + index));
  return child;
}

std::uint64_t SeededStream::next_u64() { return mix(key_ + counter_++ * kGolden); }

double SeededStream::uniform(double lo, double hi) {
  if (!(lo <= hi)) throw DomainError("uniform: lo must not exceed hi");
  const double u = double(next_u64() >> 11) * 0x1.0p-53;  // [0, 1)
  return lo + u * (hi - lo);
}

double SeededStream::gaussian(double mu, double sigma) {
  if (!(sigma >= 0.0)) throw DomainError("gaussian: sigma must be non-negative");
  if (sigma == 0.0) {
    counter_ += 2;  // keep the draw budget fixed
    return mu;
  }
  const double u1 = double((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
  const double u2 = double(next_u64() >> 11) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mu + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
}

double SeededStream::truncated_gaussian(double mu, double sigma, double cut) {
  if (!(cut > 0.0)) throw DomainError("truncated_gaussian: cut must be positive");
  if (std::isinf(cut)) return gaussian(mu, sigma);
  const double band = cut * sigma;
  for (;;) {
    const double v = gaussian(mu, sigma);
    if (std::abs(v - mu) <= band) return v;
  }
}

}  // namespace scencert
