#include "scencert/scenario.hpp"

#include <map>

#include "scencert/errors.hpp"
#include "scencert/numeric.hpp"

namespace scencert {

ScenarioFeasibleSet assemble(const Polytope& base, const ConstraintSampler& sampler,
                             std::size_t M, std::uint64_t seed) {
  if (base.dim() != sampler.dimension())
    throw DimensionMismatch("assemble: base and sampler dimensions differ");

  // compactness probes along the coordinate axes
  for (std::size_t j = 0; j < base.dim(); ++j) {
    Vec e(base.dim(), 0.0);
    for (const double sign : {1.0, -1.0}) {
      e[j] = sign;
      if (support_value(base, e).status == LPStatus::Unbounded)
        throw UnboundedSet("assemble: base set is unbounded along an axis");
    }
    e[j] = 0.0;
  }

  ScenarioFeasibleSet sfs{base, {}, base, M, seed};
  for (std::size_t m = 1; m <= M; ++m) {
    for (SampledHalfspace h : sampler.sample(seed, kTrainSpace, m)) {
      h.sample = m;
      sfs.assembled.add(h);
      sfs.sampled.push_back(std::move(h));
    }
  }

  try {
    if (chebyshev_center(sfs.assembled).second <= 0.0)
      throw EmptyFeasibleSet("assemble: intersection has empty interior");
  } catch (const InfeasibleSet&) {
    throw EmptyFeasibleSet("assemble: intersection is empty");
  }
  return sfs;
}

Certificate certify_set(const ScenarioFeasibleSet& sfs, double beta,
                        std::optional<std::size_t> k_override) {
  if (!(beta > 0.0 && beta < 1.0))
    throw DomainError("certify_set: beta must lie in (0,1)");
  const std::size_t k =
      k_override ? *k_override
                 : clarkson_support_subsample(sfs.assembled).cardinality();
  Certificate c;
  c.kind = CertificateKind::APosterioriSet;
  c.samples = sfs.sample_count;
  c.support = k;
  c.beta = beta;
  c.epsilon = epsilon_posteriori(sfs.sample_count, std::min(k, sfs.sample_count), beta);
  return c;
}

ViolationEstimate estimate_set_violation(const ScenarioFeasibleSet& sfs,
                                         const ConstraintSampler& sampler,
                                         std::size_t trials, std::uint64_t seed,
                                         std::vector<ViolationBlock>* blocks,
                                         std::size_t block_size) {
  // One-time dominance reduction: the assembled set can carry hundreds of
  // thousands of sampled rows but only one per direction can bind.
  const Polytope reduced = dedup_dominance(sfs.assembled);

  // sup over the assembled set per distinct normal; samplers with a fixed
  // constraint pattern hit the cache on every trial
  std::map<Vec, double> support_cache;
  auto supremum = [&](const Vec& normal) {
    if (auto it = support_cache.find(normal); it != support_cache.end())
      return it->second;
    const SupportEval sup = support_value(reduced, normal);
    if (sup.status == LPStatus::Unbounded)
      throw UnboundedSet("estimate_set_violation: assembled set is unbounded");
    if (sup.status == LPStatus::Infeasible)
      throw InfeasibleSet("estimate_set_violation: assembled set is empty");
    support_cache.emplace(normal, sup.value);
    return sup.value;
  };

  ViolationEstimate est;
  est.trials = trials;
  est.seed = seed;
  std::size_t block_hits = 0;
  for (std::size_t t = 1; t <= trials; ++t) {
    bool cut = false;
    for (const SampledHalfspace& h : sampler.sample(seed, kTestSpace, t)) {
      if (supremum(h.normal) > h.offset + tol::kFeas) {
        cut = true;
        break;
      }
    }
    est.hits += cut ? 1 : 0;
    block_hits += cut ? 1 : 0;
    if (blocks && (t % block_size == 0 || t == trials)) {
      const std::size_t in_block = t % block_size ? t % block_size : block_size;
      blocks->push_back({blocks->size() + 1, block_hits, in_block,
                         double(block_hits) / double(in_block)});
      block_hits = 0;
    }
  }
  est.frequency = trials ? double(est.hits) / double(trials) : 0.0;
  return est;
}

ViolationEstimate estimate_point_violation(const Vec& x,
                                           const ConstraintSampler& sampler,
                                           std::size_t trials, std::uint64_t seed) {
  if (x.size() != sampler.dimension())
    throw DimensionMismatch("estimate_point_violation: point dimension mismatch");
  ViolationEstimate est;
  est.trials = trials;
  est.seed = seed;
  for (std::size_t t = 1; t <= trials; ++t) {
    bool violated = false;
    for (const SampledHalfspace& h : sampler.sample(seed, kTestSpace, t)) {
      if (dot(h.normal, x) > h.offset + tol::kFeas) {
        violated = true;
        break;
      }
    }
    est.hits += violated ? 1 : 0;
  }
  est.frequency = trials ? double(est.hits) / double(trials) : 0.0;
  return est;
}

ViolationEstimate estimate_point_violation(const Vec& x, const ConvexSampler& sampler,
                                           std::size_t trials, std::uint64_t seed) {
  if (x.size() != sampler.dimension())
    throw DimensionMismatch("estimate_point_violation: point dimension mismatch");
  ViolationEstimate est;
  est.trials = trials;
  est.seed = seed;
  for (std::size_t t = 1; t <= trials; ++t)
    est.hits += sampler.excludes(seed, kTestSpace, t, x) ? 1 : 0;
  est.frequency = trials ? double(est.hits) / double(trials) : 0.0;
  return est;
}

}  // namespace scencert
