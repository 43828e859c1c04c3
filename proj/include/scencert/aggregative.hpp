#pragma once

#include <cstdint>
#include <vector>

#include "scencert/matrix.hpp"
#include "scencert/polytope.hpp"

#include "json.hpp"

namespace scencert {

// One realization of the uncertain cost: price slope A (symmetric PSD)
// and intercept b, both acting on the aggregate decision.
struct CostSample {
  Matrix A;  // n x n
  Vec b;     // n
};

// min over x in X of  f(x) + max_m g(x, theta_m), where both the
// deterministic part f and the sampled parts g depend on x only through
// the aggregate sigma(x) = sum_i x_i:
//   f(x) = sigma' A0 sigma + b0' sigma,   g(x, m) = sigma' A_m sigma + b_m' sigma.
struct AggregativeProgram {
  std::size_t agents = 0;   // N
  std::size_t dim = 0;      // n, per-agent decision length
  Matrix A0;                // n x n, symmetric PSD
  Vec b0;                   // n
  Polytope domain;          // over R^{n N}
  std::vector<CostSample> samples;

  AggregativeProgram() : domain(0) {}

  void validate() const;  // shape + symmetry/PSD checks

  nlohmann::json to_json() const;
  static AggregativeProgram from_json(const nlohmann::json& j);
};

struct EpigraphSolution {
  Vec x_star;
  double gamma_star = 0.0;  // equals max_m g(x_star, theta_m)
  double value = 0.0;       // f(x_star) + gamma_star
  double gap = 0.0;         // optimality gap at termination
};

// Per-iteration bounds of the cutting-plane loop, for diagnostics.
struct KelleyTrace {
  std::vector<double> lower;
  std::vector<double> upper;
};

Vec aggregate(const AggregativeProgram& prog, const Vec& x);  // sigma(x)
double eval_f(const AggregativeProgram& prog, const Vec& x);
double eval_g(const AggregativeProgram& prog, const Vec& x, const CostSample& s);
Vec grad_g(const AggregativeProgram& prog, const Vec& x, const CostSample& s);

// Kelley cutting planes on the epigraph form: a master LP over
// (x, aggregate, gamma, t) collects linearizations of f and of the most
// violated sampled cost until the bound gap closes below
// tol * max(1, |value|). The returned x is canonicalized by a fixed
// linear tie-break over the optimal aggregate slice, which makes repeated
// solves comparable point-wise.
EpigraphSolution solve_epigraph(const AggregativeProgram& prog, double tol,
                                KelleyTrace* trace = nullptr);

// Number of samples whose removal moves the optimizer (leave-one-out
// re-solves; samples inactive at the optimum are skipped, their removal
// cannot move a convex optimum).
std::size_t count_support_constraints(const AggregativeProgram& prog, double tol);

// Stacked first/second-order structure of the sampled cost at (x, s):
//   P = [[ones_{NxN} (x) A, 0], [0, 0]],  V = [ones_{1xN} (x) (2 sigma'A + b'), -1],
//   Q = [P; V].
struct SupportRankMatrices {
  Matrix P;  // (nN+1) x (nN+1)
  Matrix V;  // 1 x (nN+1)
  Matrix Q;  // (nN+2) x (nN+1)
};
SupportRankMatrices support_rank_matrices(const AggregativeProgram& prog,
                                          const Vec& x, const CostSample& s);

// Random (x, sample) probes of rank(Q): true iff the rank never exceeds
// n+1, and equals n+1 whenever the sample's A is nonsingular.
bool check_support_rank_bound(const AggregativeProgram& prog, std::size_t trials,
                              std::uint64_t seed);

// Fresh-sample cost-deterioration event at the solved optimum:
// g(x*, s) > gamma* + feasTol.
bool cost_deterioration_event(const AggregativeProgram& prog,
                              const EpigraphSolution& sol, const CostSample& s);

}  // namespace scencert
