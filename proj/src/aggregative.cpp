#include "scencert/aggregative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scencert/errors.hpp"
#include "scencert/numeric.hpp"
#include "scencert/parallel.hpp"
#include "scencert/sampling.hpp"

namespace scencert {

namespace {

constexpr std::size_t kCutCap = 2000;
constexpr std::size_t kIterationCap = 5000;
constexpr std::size_t kStaleAge = 12;  // drop cuts inactive this many rounds

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j.at(0).size() : 0;
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
  return m;
}

void check_cost_matrix(const Matrix& a, std::size_t n, const char* what) {
  if (a.rows() != n || a.cols() != n)
    throw DimensionMismatch(std::string(what) + ": wrong shape");
  if (!a.finite()) throw DomainError(std::string(what) + ": non-finite entries");
  if (!a.symmetric(1e-12 * std::max(1.0, a.max_abs())))
    throw DomainError(std::string(what) + ": matrix is not symmetric");
  if (min_eigenvalue_symmetric(a) < -1e-10 * std::max(1.0, a.max_abs()))
    throw DomainError(std::string(what) + ": matrix is not positive semi-definite");
}

double quad(const Matrix& a, const Vec& b, const Vec& z) {
  return dot(z, a.apply(z)) + dot(b, z);
}

Vec quad_grad(const Matrix& a, const Vec& b, const Vec& z) {
  Vec g = a.apply(z);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = 2.0 * g[k] + b[k];
  return g;
}

struct Cut {
  Vec zcoef;     // gradient in aggregate coordinates
  double rhs;    // zcoef . z_j - value(z_j)
  bool on_t;     // true: bounds t (deterministic part), false: bounds gamma
  std::size_t stale = 0;
};

// Fixed generic direction used to select one optimizer out of the
// aggregate-equivalent slice; any x with the same aggregate has the same
// cost, so the choice is free and this makes it reproducible.
Vec tie_break_direction(std::size_t d) {
  SeededStream s(0x5ca1ab1e, "tiebreak");
  Vec c(d);
  for (auto& v : c) v = s.uniform(-1.0, 1.0);
  return c;
}

}  // namespace

void AggregativeProgram::validate() const {
  if (agents == 0 || dim == 0)
    throw DomainError("AggregativeProgram: agents and dim must be positive");
  if (domain.dim() != agents * dim)
    throw DimensionMismatch("AggregativeProgram: domain dimension mismatch");
  check_cost_matrix(A0, dim, "A0");
  if (b0.size() != dim) throw DimensionMismatch("AggregativeProgram: b0 length");
  for (const CostSample& s : samples) {
    check_cost_matrix(s.A, dim, "cost sample A");
    if (s.b.size() != dim)
      throw DimensionMismatch("AggregativeProgram: cost sample b length");
  }
}

nlohmann::json AggregativeProgram::to_json() const {
  nlohmann::json samp = nlohmann::json::array();
  for (const CostSample& s : samples)
    samp.push_back({{"A", matrix_to_json(s.A)}, {"b", s.b}});
  return nlohmann::json{{"N", agents},
                        {"n", dim},
                        {"A0", matrix_to_json(A0)},
                        {"b0", b0},
                        {"X", domain.to_json()},
                        {"samples", std::move(samp)}};
}

AggregativeProgram AggregativeProgram::from_json(const nlohmann::json& j) {
  AggregativeProgram p;
  p.agents = j.at("N").get<std::size_t>();
  p.dim = j.at("n").get<std::size_t>();
  p.A0 = matrix_from_json(j.at("A0"));
  p.b0 = j.at("b0").get<Vec>();
  p.domain = Polytope::from_json(j.at("X"));
  for (const auto& s : j.at("samples"))
    p.samples.push_back({matrix_from_json(s.at("A")), s.at("b").get<Vec>()});
  p.validate();
  return p;
}

Vec aggregate(const AggregativeProgram& prog, const Vec& x) {
  if (x.size() != prog.agents * prog.dim)
    throw DimensionMismatch("aggregate: x has the wrong length");
  Vec z(prog.dim, 0.0);
  for (std::size_t i = 0; i < prog.agents; ++i)
    for (std::size_t k = 0; k < prog.dim; ++k) z[k] += x[i * prog.dim + k];
  return z;
}

double eval_f(const AggregativeProgram& prog, const Vec& x) {
  return quad(prog.A0, prog.b0, aggregate(prog, x));
}

double eval_g(const AggregativeProgram& prog, const Vec& x, const CostSample& s) {
  if (s.b.size() != prog.dim || s.A.rows() != prog.dim)
    throw DimensionMismatch("eval_g: sample dimension mismatch");
  return quad(s.A, s.b, aggregate(prog, x));
}

Vec grad_g(const AggregativeProgram& prog, const Vec& x, const CostSample& s) {
  const Vec gz = quad_grad(s.A, s.b, aggregate(prog, x));
  Vec g(prog.agents * prog.dim);
  for (std::size_t i = 0; i < prog.agents; ++i)
    for (std::size_t k = 0; k < prog.dim; ++k) g[i * prog.dim + k] = gz[k];
  return g;
}

EpigraphSolution solve_epigraph(const AggregativeProgram& prog, double tol,
                                KelleyTrace* trace) {
  prog.validate();
  const std::size_t D = prog.agents * prog.dim;
  const std::size_t n = prog.dim;
  const std::size_t M = prog.samples.size();
  // master variables: [x | z | gamma | t]
  const std::size_t nvars = D + n + 2;
  const std::size_t gamma_col = D + n;
  const std::size_t t_col = D + n + 1;

  Vec x0;
  try {
    x0 = chebyshev_center(prog.domain).first;
  } catch (const InfeasibleSet&) {
    throw InfeasibleDomain("solve_epigraph: domain is empty");
  }

  const auto value_at = [&](const Vec& z) {
    double worst = M ? -std::numeric_limits<double>::infinity() : 0.0;
    for (std::size_t m = 0; m < M; ++m)
      worst = std::max(worst, quad(prog.samples[m].A, prog.samples[m].b, z));
    return quad(prog.A0, prog.b0, z) + worst;
  };
  const auto worst_sample = [&](const Vec& z) {
    std::size_t arg = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < M; ++m) {
      const double v = quad(prog.samples[m].A, prog.samples[m].b, z);
      if (v > best) {
        best = v;
        arg = m;
      }
    }
    return arg;
  };

  std::vector<Cut> cuts;
  const auto push_cut = [&](Vec coef, double rhs, bool on_t) {
    for (const Cut& c : cuts) {  // duplicate rows only feed degeneracy
      if (c.on_t != on_t) continue;
      if (std::abs(c.rhs - rhs) > 1e-12 * (1.0 + std::abs(rhs))) continue;
      double dmax = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        dmax = std::max(dmax, std::abs(c.zcoef[k] - coef[k]));
      if (dmax <= 1e-12 * (1.0 + std::abs(rhs))) return;
    }
    cuts.push_back({std::move(coef), rhs, on_t, 0});
  };
  const auto add_cuts_at = [&](const Vec& z) {
    const Vec g0 = quad_grad(prog.A0, prog.b0, z);
    push_cut(g0, dot(g0, z) - quad(prog.A0, prog.b0, z), true);
    if (M > 0) {
      const std::size_t m = worst_sample(z);
      const Vec gm = quad_grad(prog.samples[m].A, prog.samples[m].b, z);
      push_cut(gm, dot(gm, z) - quad(prog.samples[m].A, prog.samples[m].b, z), false);
    }
  };
  // Linearizing only at master optima makes the loop crawl on the smooth
  // quadratic part; interpolated points towards the incumbent sample the
  // curvature along the approach direction and restore fast convergence.
  const auto add_cuts_towards = [&](const Vec& from, const Vec& to) {
    double gap = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      gap = std::max(gap, std::abs(from[k] - to[k]));
    if (gap <= 1e-13) return;
    for (const double w : {0.25, 0.5, 0.75}) {
      Vec p(n);
      for (std::size_t k = 0; k < n; ++k) p[k] = from[k] + w * (to[k] - from[k]);
      add_cuts_at(p);
    }
  };

  Vec z0(n, 0.0);
  for (std::size_t i = 0; i < prog.agents; ++i)
    for (std::size_t k = 0; k < n; ++k) z0[k] += x0[i * n + k];
  add_cuts_at(z0);

  double lb = -std::numeric_limits<double>::infinity();
  double ub = value_at(z0);
  Vec best_x = x0, best_z = z0;

  const std::size_t base_rows = prog.domain.size() + n + (M == 0 ? 1 : 0);

  for (std::size_t iter = 0; iter < kIterationCap; ++iter) {
    // assemble the master LP
    LinearProgram lp;
    lp.objective.assign(nvars, 0.0);
    lp.objective[gamma_col] = -1.0;
    lp.objective[t_col] = -1.0;
    const std::size_t rows = base_rows + cuts.size();
    lp.constraints = Matrix(rows, nvars);
    lp.rhs.assign(rows, 0.0);
    lp.equality.assign(rows, 0);
    std::size_t r = 0;
    for (const Halfspace& h : prog.domain.rows()) {
      for (std::size_t j = 0; j < D; ++j) lp.constraints(r, j) = h.normal[j];
      lp.rhs[r] = h.offset;
      ++r;
    }
    for (std::size_t k = 0; k < n; ++k) {  // aggregate coupling
      for (std::size_t i = 0; i < prog.agents; ++i)
        lp.constraints(r, i * n + k) = 1.0;
      lp.constraints(r, D + k) = -1.0;
      lp.equality[r] = 1;
      ++r;
    }
    if (M == 0) {  // no sampled part: pin gamma
      lp.constraints(r, gamma_col) = 1.0;
      lp.equality[r] = 1;
      ++r;
    }
    for (const Cut& c : cuts) {
      for (std::size_t k = 0; k < n; ++k) lp.constraints(r, D + k) = c.zcoef[k];
      lp.constraints(r, c.on_t ? t_col : gamma_col) = -1.0;
      lp.rhs[r] = c.rhs;
      ++r;
    }

    const LPOutcome out = solve_lp(lp);
    if (out.status == LPStatus::Infeasible)
      throw InfeasibleDomain("solve_epigraph: master LP infeasible");
    if (out.status == LPStatus::Unbounded)
      throw Error("solve_epigraph: master LP unbounded after seeding cuts");


    const double master_value = out.optimizer[gamma_col] + out.optimizer[t_col];
    lb = std::max(lb, master_value);

    Vec z(out.optimizer.begin() + D, out.optimizer.begin() + D + n);
    const double fz = value_at(z);
    const Vec prev_best = best_z;
    if (fz < ub) {
      ub = fz;
      best_x.assign(out.optimizer.begin(), out.optimizer.begin() + D);
      best_z = z;
    }
    if (trace) {
      trace->lower.push_back(lb);
      trace->upper.push_back(ub);
    }
    if (lb > ub + 1e-6 * std::max(1.0, std::abs(ub)))
      throw Error("solve_epigraph: lower bound crossed the incumbent");
    if (ub - lb <= tol * std::max(1.0, std::abs(ub))) break;

    // age out cuts that stayed slack at the master optimum
    for (Cut& c : cuts) {
      const double lhs = dot(c.zcoef, z) -
                         (c.on_t ? out.optimizer[t_col] : out.optimizer[gamma_col]);
      if (lhs < c.rhs - tol::kFeas)
        ++c.stale;
      else
        c.stale = 0;
    }
    std::erase_if(cuts, [](const Cut& c) { return c.stale > kStaleAge; });
    if (cuts.size() + 8 > kCutCap)
      throw IterationLimit("solve_epigraph: cut budget exhausted before the gap closed");
    add_cuts_at(z);
    add_cuts_towards(prev_best, z);
    if (iter + 1 == kIterationCap)
      throw IterationLimit("solve_epigraph: iteration cap reached");
  }

  // canonical optimizer on the aggregate slice {x in X : sigma(x) = best_z}
  {
    LinearProgram lp;
    const Vec c = tie_break_direction(D);
    lp.objective.assign(D, 0.0);
    for (std::size_t j = 0; j < D; ++j) lp.objective[j] = -c[j];
    const std::size_t rows = prog.domain.size() + n;
    lp.constraints = Matrix(rows, D);
    lp.rhs.assign(rows, 0.0);
    lp.equality.assign(rows, 0);
    std::size_t r = 0;
    for (const Halfspace& h : prog.domain.rows()) {
      for (std::size_t j = 0; j < D; ++j) lp.constraints(r, j) = h.normal[j];
      lp.rhs[r] = h.offset;
      ++r;
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < prog.agents; ++i)
        lp.constraints(r, i * n + k) = 1.0;
      lp.rhs[r] = best_z[k];
      lp.equality[r] = 1;
      ++r;
    }
    const LPOutcome out = solve_lp(lp);
    if (out.status == LPStatus::Optimal) best_x = out.optimizer;
  }

  EpigraphSolution sol;
  sol.x_star = best_x;
  double worst = 0.0;
  if (M > 0) {
    worst = -std::numeric_limits<double>::infinity();
    for (const CostSample& s : prog.samples)
      worst = std::max(worst, eval_g(prog, best_x, s));
  }
  sol.gamma_star = worst;
  sol.value = eval_f(prog, best_x) + sol.gamma_star;
  sol.gap = std::max(0.0, sol.value - lb);
  return sol;
}

std::size_t count_support_constraints(const AggregativeProgram& prog, double tol) {
  if (prog.samples.empty())
    throw DomainError("count_support_constraints: program has no cost samples");
  const EpigraphSolution base = solve_epigraph(prog, tol);

  // only samples active at the optimum can be of support
  const double act_margin =
      std::max(1e-5, 100.0 * tol) * std::max(1.0, std::abs(base.gamma_star));
  std::vector<std::size_t> active;
  for (std::size_t m = 0; m < prog.samples.size(); ++m)
    if (eval_g(prog, base.x_star, prog.samples[m]) >= base.gamma_star - act_margin)
      active.push_back(m);

  const double value_margin = 10.0 * tol * std::max(1.0, std::abs(base.value));
  std::vector<std::uint8_t> support(active.size(), 0);
  parallel_for(active.size(), [&](std::size_t idx) {
    AggregativeProgram reduced = prog;
    reduced.samples.erase(reduced.samples.begin() +
                          std::ptrdiff_t(active[idx]));
    const EpigraphSolution sol = solve_epigraph(reduced, tol);
    double move = 0.0;
    for (std::size_t j = 0; j < sol.x_star.size(); ++j) {
      const double d = sol.x_star[j] - base.x_star[j];
      move += d * d;
    }
    support[idx] = std::sqrt(move) > tol::kSupportMove &&
                   base.value - sol.value > value_margin;
  });

  std::size_t count = 0;
  for (const auto s : support) count += s;
  return count;
}

SupportRankMatrices support_rank_matrices(const AggregativeProgram& prog,
                                          const Vec& x, const CostSample& s) {
  if (x.size() != prog.agents * prog.dim)
    throw DimensionMismatch("support_rank_matrices: x length mismatch");
  const std::size_t D = prog.agents * prog.dim;
  const Vec z = aggregate(prog, x);

  SupportRankMatrices out;
  const Matrix atil = Matrix::ones_kron(prog.agents, prog.agents, s.A);
  out.P = Matrix(D + 1, D + 1);
  for (std::size_t i = 0; i < D; ++i)
    for (std::size_t j = 0; j < D; ++j) out.P(i, j) = atil(i, j);

  const Vec row = quad_grad(s.A, s.b, z);  // 2 A z + b
  out.V = Matrix(1, D + 1);
  for (std::size_t i = 0; i < prog.agents; ++i)
    for (std::size_t k = 0; k < prog.dim; ++k)
      out.V(0, i * prog.dim + k) = row[k];
  out.V(0, D) = -1.0;

  out.Q = Matrix(D + 2, D + 1);
  for (std::size_t i = 0; i < D + 1; ++i)
    for (std::size_t j = 0; j < D + 1; ++j) out.Q(i, j) = out.P(i, j);
  for (std::size_t j = 0; j < D + 1; ++j) out.Q(D + 1, j) = out.V(0, j);
  return out;
}

bool check_support_rank_bound(const AggregativeProgram& prog, std::size_t trials,
                              std::uint64_t seed) {
  if (trials == 0) throw DomainError("check_support_rank_bound: trials must be >= 1");
  if (prog.samples.empty()) return true;
  SeededStream stream(seed, "support-rank");
  for (std::size_t t = 0; t < trials; ++t) {
    SeededStream probe = stream.derive("probe", t);
    Vec x(prog.agents * prog.dim);
    for (auto& v : x) v = probe.uniform(-1.0, 1.0);
    const CostSample& s = prog.samples[t % prog.samples.size()];
    const SupportRankMatrices m = support_rank_matrices(prog, x, s);
    const double qtol = 1e-9 * std::max(1.0, m.Q.max_abs());
    const std::size_t rank = numeric_rank(m.Q, qtol);
    if (rank > prog.dim + 1) return false;
    const double atol = 1e-9 * std::max(1.0, s.A.max_abs());
    if (numeric_rank(s.A, atol) == prog.dim && rank != prog.dim + 1) return false;
  }
  return true;
}

bool cost_deterioration_event(const AggregativeProgram& prog,
                              const EpigraphSolution& sol, const CostSample& s) {
  return eval_g(prog, sol.x_star, s) > sol.gamma_star + tol::kFeas;
}

}  // namespace scencert
