#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "scencert/certificates.hpp"
#include "scencert/polytope.hpp"
#include "scencert/sampling.hpp"

namespace scencert {

using SampledHalfspace = Halfspace;

// Namespace labels separating the training stream from the fresh
// validation stream drawn from the same seed.
inline constexpr std::string_view kTrainSpace = "train";
inline constexpr std::string_view kTestSpace = "test";

// Deterministic map from (seed, namespace, sample index) to the
// constraints of one uncertainty realization. Identical inputs must
// yield identical constraints; this emulates an i.i.d. scenario stream.
class ConstraintSampler {
 public:
  virtual ~ConstraintSampler() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<SampledHalfspace> sample(std::uint64_t seed,
                                               std::string_view space,
                                               std::size_t index) const = 0;
};

// General convex realization, reduced to the one question Monte Carlo
// point checks need: does the sampled constraint set exclude x? Set
// certification requires the polytopic sampler above; this interface only
// serves point-violation estimates.
class ConvexSampler {
 public:
  virtual ~ConvexSampler() = default;
  virtual std::size_t dimension() const = 0;
  virtual bool excludes(std::uint64_t seed, std::string_view space,
                        std::size_t index, const Vec& x) const = 0;
};

// Deterministic base set intersected with M sampled constraint sets.
struct ScenarioFeasibleSet {
  Polytope base;
  std::vector<SampledHalfspace> sampled;
  Polytope assembled;
  std::size_t sample_count = 0;  // M
  std::uint64_t seed = 0;
};

struct ViolationEstimate {
  std::size_t hits = 0;
  std::size_t trials = 0;
  double frequency = 0.0;
  std::uint64_t seed = 0;
};

// Per-block breakdown of a Monte Carlo run, for streaming to CSV.
struct ViolationBlock {
  std::size_t block = 0;
  std::size_t hits = 0;
  std::size_t trials = 0;
  double frequency = 0.0;
};

// Intersects the compact base with samples 1..M from the training stream.
// Throws UnboundedSet when the base fails the boundedness probes and
// EmptyFeasibleSet when the intersection has no interior.
ScenarioFeasibleSet assemble(const Polytope& base, const ConstraintSampler& sampler,
                             std::size_t M, std::uint64_t seed);

// Wait-and-judge certificate for the whole assembled set. k comes from
// k_override when given (e.g. a structural facet bound), otherwise from
// the Clarkson support subsample over the sampled constraints.
Certificate certify_set(const ScenarioFeasibleSet& sfs, double beta,
                        std::optional<std::size_t> k_override = {});

// Fraction of fresh test samples whose constraint set is violated by at
// least one point of the assembled polytope. Support values are cached
// per distinct constraint normal, so repeated directions cost one LP.
// When `blocks` is given, trial counts are also accumulated per block of
// `block_size` consecutive trials.
ViolationEstimate estimate_set_violation(const ScenarioFeasibleSet& sfs,
                                         const ConstraintSampler& sampler,
                                         std::size_t trials, std::uint64_t seed,
                                         std::vector<ViolationBlock>* blocks = nullptr,
                                         std::size_t block_size = 1000);

// Fraction of fresh test samples violated by the fixed point x.
ViolationEstimate estimate_point_violation(const Vec& x,
                                           const ConstraintSampler& sampler,
                                           std::size_t trials, std::uint64_t seed);
ViolationEstimate estimate_point_violation(const Vec& x, const ConvexSampler& sampler,
                                           std::size_t trials, std::uint64_t seed);

}  // namespace scencert
