#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace scencert {

// Counter-based random stream: every draw is a pure function of
// (seed, namespace chain, counter), so streams can be forked and consumed
// in parallel while staying bit-reproducible. Distinct namespaces give
// statistically independent streams.
class SeededStream {
 public:
  SeededStream(std::uint64_t seed, std::string_view space);

  // Child stream for a labelled index (e.g. one per Monte Carlo trial).
  SeededStream derive(std::string_view label, std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  const std::string& space() const { return space_; }

  std::uint64_t next_u64();

  // draw in [lo, hi); lo == hi collapses to the point
  double uniform(double lo, double hi);

  // Box-Muller; sigma == 0 returns mu exactly
  double gaussian(double mu, double sigma);

  // rejection sampling until |value - mu| <= cut * sigma;
  // cut = +infinity is the plain-gaussian sentinel
  double truncated_gaussian(double mu, double sigma, double cut);

 private:
  SeededStream() = default;

  std::uint64_t seed_ = 0;
  std::string space_;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace scencert
