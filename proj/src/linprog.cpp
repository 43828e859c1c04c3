#include "scencert/linprog.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "scencert/errors.hpp"
#include "scencert/numeric.hpp"

namespace scencert {

namespace {

// Internal solver, templated on the working precision. The default pass
// runs in double; verdicts that fail certification against the original
// data are retried with a graded right-hand-side perturbation and then in
// long double. Everything is deterministic, so the escalation ladder is a
// pure function of the input.
template <class Real>
struct Standard {
  std::size_t m = 0, n = 0;
  std::vector<Real> a;  // m x n row-major, immutable
  std::vector<Real> b;  // length m, immutable
};

template <class Real>
struct Tableau {
  std::vector<Real> a;
  std::vector<Real> b;
  std::vector<std::size_t> basis;
};

enum class PivotResult { Optimal, Unbounded, Stuck };

// Rebuild the tableau as B^{-1} [A | b] for the current basis via dense
// LU with partial pivoting; false when the basis matrix is singular.
template <class Real>
bool refactorize(const Standard<Real>& s, Tableau<Real>& t) {
  const std::size_t m = s.m, n = s.n;
  std::vector<Real> lu(m * m);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t i = 0; i < m; ++i) lu[r * m + i] = s.a[r * n + t.basis[i]];
  std::vector<std::size_t> perm(m);
  for (std::size_t i = 0; i < m; ++i) perm[i] = i;
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(lu[perm[r] * m + col]) > std::abs(lu[perm[piv] * m + col]))
        piv = r;
    if (std::abs(lu[perm[piv] * m + col]) < Real(1e-14)) return false;
    std::swap(perm[col], perm[piv]);
    const Real inv = Real(1) / lu[perm[col] * m + col];
    for (std::size_t r = col + 1; r < m; ++r) {
      const Real f = lu[perm[r] * m + col] * inv;
      lu[perm[r] * m + col] = f;
      for (std::size_t c = col + 1; c < m; ++c)
        lu[perm[r] * m + c] -= f * lu[perm[col] * m + c];
    }
  }
  t.a.assign(m * n, Real(0));
  t.b.assign(m, Real(0));
  std::vector<Real> y(m);
  auto solve_into = [&](const Real* rhs, std::size_t stride, Real* out,
                        std::size_t out_stride) {
    for (std::size_t i = 0; i < m; ++i) {
      Real v = rhs[perm[i] * stride];
      for (std::size_t k = 0; k < i; ++k) v -= lu[perm[i] * m + k] * y[k];
      y[i] = v;
    }
    for (std::size_t ii = m; ii-- > 0;) {
      Real v = y[ii];
      for (std::size_t k = ii + 1; k < m; ++k) v -= lu[perm[ii] * m + k] * y[k];
      y[ii] = v / lu[perm[ii] * m + ii];
    }
    for (std::size_t i = 0; i < m; ++i) out[i * out_stride] = y[i];
  };
  for (std::size_t c = 0; c < n; ++c) solve_into(&s.a[c], n, &t.a[c], n);
  solve_into(&s.b[0], 1, &t.b[0], 1);
  const Real teps = Real(1000) * std::numeric_limits<Real>::epsilon();
  for (std::size_t i = 0; i < m; ++i)
    if (t.b[i] < Real(0) && t.b[i] > -teps) t.b[i] = Real(0);
  return true;
}

template <class Real>
void reduced_costs(const Standard<Real>& s, const Tableau<Real>& t,
                   const std::vector<Real>& cost, std::vector<Real>& red,
                   Real& obj) {
  const std::size_t m = s.m, n = s.n;
  red = cost;
  obj = Real(0);
  for (std::size_t i = 0; i < m; ++i) {
    const Real cb = cost[t.basis[i]];
    if (cb == Real(0)) continue;
    for (std::size_t j = 0; j < n; ++j) red[j] -= cb * t.a[i * n + j];
    obj += cb * t.b[i];
  }
}

// Bland's entering rule; the leaving row takes the largest pivot among
// minimum-ratio ties, with a sticky switch to pure Bland once degenerate
// pivots pile up. Columns whose best pivot is tiny are deferred unless a
// freshly refactorized tableau confirms them: pivoting on near-zeros is
// what shreds the basis.
template <class Real>
PivotResult run_simplex(const Standard<Real>& s, Tableau<Real>& t,
                        const std::vector<Real>& cost, std::vector<Real>& red,
                        Real& obj, const std::vector<std::uint8_t>& allowed,
                        std::size_t* unbounded_col) {
  const std::size_t m = s.m, n = s.n;
  const Real kPivot = Real(tol::kPivot);
  const Real teps = Real(1000) * std::numeric_limits<Real>::epsilon();
  reduced_costs(s, t, cost, red, obj);
  std::size_t stalled = 0, since_refactor = 0;
  int verdicts_rechecked = 0;
  bool bland = false;
  bool fresh = true;
  Real bscale = Real(1);
  for (const Real v : s.b) bscale = std::max(bscale, std::abs(v));

  const auto feasible_basis = [&]() {
    const Real floor = Real(-1e-9) * std::max(Real(1), bscale);
    for (std::size_t i = 0; i < m; ++i)
      if (t.b[i] < floor) return false;
    return true;
  };

  for (std::size_t pivots = 0;; ++pivots) {
    if (pivots > 200000) return PivotResult::Stuck;

    if (pivots % 64 == 0 && !feasible_basis()) {
      if (!refactorize(s, t)) return PivotResult::Stuck;
      reduced_costs(s, t, cost, red, obj);
      fresh = true;
      if (!feasible_basis()) return PivotResult::Stuck;
    }

    if (stalled > 600) bland = true;  // sticky anti-cycling mode

    // improving columns, steepest first; plain index order (Bland) once
    // the anti-cycling mode is on
    std::vector<std::size_t> order;
    order.reserve(16);
    for (std::size_t j = 0; j < n; ++j)
      if (allowed[j] && red[j] < -kPivot) order.push_back(j);
    if (!bland)
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return red[a] < red[b]; });

    std::size_t enter = n, leave = m;
    std::size_t enter_fb = n, leave_fb = m;
    for (const std::size_t j : order) {

      Real best_ratio = std::numeric_limits<Real>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        const Real aij = t.a[i * n + j];
        if (aij > kPivot)
          best_ratio = std::min(best_ratio, std::max(t.b[i], Real(0)) / aij);
      }
      if (!std::isfinite(double(best_ratio))) {
        // validate on a clean tableau before reporting an unbounded ray
        if (!refactorize(s, t)) return PivotResult::Stuck;
        reduced_costs(s, t, cost, red, obj);
        fresh = true;
        if (!feasible_basis()) return PivotResult::Stuck;
        if (red[j] >= -kPivot) break;  // drift artefact; re-scan
        bool still_free = true;
        for (std::size_t i = 0; i < m && still_free; ++i)
          if (t.a[i * n + j] > kPivot) still_free = false;
        if (!still_free) break;
        if (unbounded_col) *unbounded_col = j;
        return PivotResult::Unbounded;
      }

      const Real tie = teps * (Real(1) + std::abs(best_ratio));
      std::size_t cand = m;
      for (std::size_t i = 0; i < m; ++i) {
        const Real aij = t.a[i * n + j];
        if (aij <= kPivot || std::max(t.b[i], Real(0)) / aij > best_ratio + tie)
          continue;
        if (cand == m) {
          cand = i;
        } else if (bland) {
          if (t.basis[i] < t.basis[cand]) cand = i;
        } else if (aij > t.a[cand * n + j] * (Real(1) + teps)) {
          cand = i;
        }
      }
      if (cand == m) continue;
      if (t.a[cand * n + j] >= Real(1e-7) || bland) {
        enter = j;
        leave = cand;
        break;
      }
      if (enter_fb == n) {
        enter_fb = j;
        leave_fb = cand;
      }
    }
    if (enter == n && enter_fb != n) {
      if (!fresh) {  // distrust tiny pivots on a drifted tableau
        if (!refactorize(s, t)) return PivotResult::Stuck;
        reduced_costs(s, t, cost, red, obj);
        fresh = true;
        continue;
      }
      enter = enter_fb;
      leave = leave_fb;
    }
    if (enter == n) {
      if (verdicts_rechecked++ > 6) return PivotResult::Optimal;
      if (!refactorize(s, t)) return PivotResult::Stuck;
      reduced_costs(s, t, cost, red, obj);
      fresh = true;
      if (!feasible_basis()) return PivotResult::Stuck;
      bool improving = false;
      for (std::size_t j = 0; j < n && !improving; ++j)
        if (allowed[j] && red[j] < Real(-10) * kPivot) improving = true;
      if (!improving) return PivotResult::Optimal;
      continue;  // resume with the refreshed tableau
    }

    const Real piv = t.a[leave * n + enter];
    const Real inv = Real(1) / piv;
    for (std::size_t j = 0; j < n; ++j) t.a[leave * n + j] *= inv;
    t.b[leave] *= inv;
    if (t.b[leave] < Real(0) && t.b[leave] > -teps) t.b[leave] = Real(0);
    t.a[leave * n + enter] = Real(1);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      const Real f = t.a[i * n + enter];
      if (f == Real(0)) continue;
      for (std::size_t j = 0; j < n; ++j) t.a[i * n + j] -= f * t.a[leave * n + j];
      t.b[i] -= f * t.b[leave];
      t.a[i * n + enter] = Real(0);
      if (t.b[i] < Real(0) && t.b[i] > -teps) t.b[i] = Real(0);
    }
    const Real rf = red[enter];
    for (std::size_t j = 0; j < n; ++j) red[j] -= rf * t.a[leave * n + j];
    const Real dobj = rf * t.b[leave];
    obj += dobj;
    red[enter] = Real(0);
    t.basis[leave] = enter;
    fresh = false;
    stalled = std::abs(dobj) <= Real(1e-14) * (Real(1) + std::abs(obj))
                  ? stalled + 1
                  : 0;

    if (++since_refactor >= 800) {
      since_refactor = 0;
      if (!refactorize(s, t)) return PivotResult::Stuck;
      reduced_costs(s, t, cost, red, obj);
      fresh = true;
    }
  }
}

struct Attempt {
  LPStatus status = LPStatus::Infeasible;
  Vec x;
  Vec ray;
  bool stuck = false;
};

template <class Real>
Attempt solve_once(const LinearProgram& lp, double perturb) {
  const std::size_t d = lp.objective.size();
  const std::size_t m = lp.constraints.rows();
  auto is_eq = [&](std::size_t i) {
    return !lp.equality.empty() && lp.equality[i] != 0;
  };

  // row equilibration keeps pivot tolerances meaningful across scales
  std::vector<Real> row_scale(m, Real(1));
  for (std::size_t i = 0; i < m; ++i) {
    Real mx = Real(0);
    for (std::size_t j = 0; j < d; ++j)
      mx = std::max(mx, std::abs(Real(lp.constraints(i, j))));
    if (mx > Real(0)) row_scale[i] = Real(1) / mx;
  }

  std::size_t slack_count = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (!is_eq(i)) ++slack_count;

  const auto scaled_rhs = [&](std::size_t i) {
    Real rhs = Real(lp.rhs[i]) * row_scale[i];
    if (!is_eq(i)) rhs += Real(perturb) * Real(double(i + 1));
    return rhs;
  };

  std::size_t art_count = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (is_eq(i) || scaled_rhs(i) < Real(0)) ++art_count;

  const std::size_t n_struct = 2 * d + slack_count;
  const std::size_t n_total = n_struct + art_count;

  Standard<Real> s;
  s.m = m;
  s.n = n_total;
  s.a.assign(m * n_total, Real(0));
  s.b.assign(m, Real(0));
  Tableau<Real> t;
  t.basis.assign(m, n_total);

  std::size_t slack_idx = 0, art_idx = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const Real rhs = scaled_rhs(i);
    const Real sign = rhs < Real(0) ? Real(-1) : Real(1);
    for (std::size_t j = 0; j < d; ++j) {
      const Real g = sign * Real(lp.constraints(i, j)) * row_scale[i];
      s.a[i * n_total + j] = g;
      s.a[i * n_total + d + j] = -g;
    }
    s.b[i] = sign * rhs;
    if (!is_eq(i)) {
      s.a[i * n_total + 2 * d + slack_idx] = sign;
      if (sign > Real(0)) t.basis[i] = 2 * d + slack_idx;
      ++slack_idx;
    }
    if (t.basis[i] == n_total) {
      s.a[i * n_total + n_struct + art_idx] = Real(1);
      t.basis[i] = n_struct + art_idx;
      ++art_idx;
    }
  }
  assert(art_idx == art_count);
  t.a = s.a;
  t.b = s.b;

  std::vector<std::uint8_t> allow_all(n_total, 1);
  std::vector<std::uint8_t> allow_struct(n_total, 1);
  for (std::size_t j = n_struct; j < n_total; ++j) allow_struct[j] = 0;

  std::vector<Real> red;
  Real obj = Real(0);

  if (art_count > 0) {
    std::vector<Real> cost(n_total, Real(0));
    for (std::size_t j = n_struct; j < n_total; ++j) cost[j] = Real(1);
    const PivotResult pr = run_simplex(s, t, cost, red, obj, allow_all, nullptr);
    if (pr == PivotResult::Stuck) return {LPStatus::Infeasible, {}, {}, true};

    Real scale = Real(1);
    for (const Real v : s.b) scale = std::max(scale, std::abs(v));
    if (obj > Real(tol::kFeas) * scale) return {LPStatus::Infeasible, {}, {}, false};

    // pivot lingering artificials out of the basis where possible
    for (std::size_t i = 0; i < m; ++i) {
      if (t.basis[i] < n_struct) continue;
      std::size_t piv_col = n_struct;
      for (std::size_t j = 0; j < n_struct; ++j) {
        if (std::abs(t.a[i * n_total + j]) > Real(1e-7)) {
          piv_col = j;
          break;
        }
      }
      if (piv_col == n_struct) continue;  // redundant row, artificial stays at zero
      const Real inv = Real(1) / t.a[i * n_total + piv_col];
      for (std::size_t j = 0; j < n_total; ++j) t.a[i * n_total + j] *= inv;
      t.b[i] *= inv;
      for (std::size_t r = 0; r < m; ++r) {
        if (r == i) continue;
        const Real f = t.a[r * n_total + piv_col];
        if (f == Real(0)) continue;
        for (std::size_t j = 0; j < n_total; ++j)
          t.a[r * n_total + j] -= f * t.a[i * n_total + j];
        t.b[r] -= f * t.b[i];
      }
      t.basis[i] = piv_col;
    }
  }

  std::vector<Real> cost(n_total, Real(0));
  for (std::size_t j = 0; j < d; ++j) {
    cost[j] = Real(-lp.objective[j]);
    cost[d + j] = Real(lp.objective[j]);
  }
  std::size_t unb_col = n_total;
  const PivotResult pr = run_simplex(s, t, cost, red, obj, allow_struct, &unb_col);
  if (pr == PivotResult::Stuck) return {LPStatus::Infeasible, {}, {}, true};

  if (pr == PivotResult::Unbounded) {
    std::vector<Real> ray(d, Real(0));
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t bj = t.basis[i];
      const Real delta = -t.a[i * n_total + unb_col];
      if (bj < d)
        ray[bj] += delta;
      else if (bj < 2 * d)
        ray[bj - d] -= delta;
    }
    if (unb_col < d)
      ray[unb_col] += Real(1);
    else if (unb_col < 2 * d)
      ray[unb_col - d] -= Real(1);
    Vec out(d);
    for (std::size_t j = 0; j < d; ++j) out[j] = double(ray[j]);
    return {LPStatus::Unbounded, {}, std::move(out), false};
  }

  std::vector<Real> x(d, Real(0));
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t bj = t.basis[i];
    if (bj < d)
      x[bj] += t.b[i];
    else if (bj < 2 * d)
      x[bj - d] -= t.b[i];
  }
  Vec out(d);
  for (std::size_t j = 0; j < d; ++j) out[j] = double(x[j]);
  return {LPStatus::Optimal, std::move(out), {}, false};
}

// Verdict certificates against the raw input data. The simplex path can
// drift on ill-conditioned bases; a verdict only counts when the returned
// witness survives these checks.
bool certify_optimal(const LinearProgram& lp, const Vec& x) {
  const std::size_t d = lp.objective.size();
  for (std::size_t i = 0; i < lp.constraints.rows(); ++i) {
    double lhs = 0.0, scale = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      lhs += lp.constraints(i, j) * x[j];
      scale = std::max(scale, std::abs(lp.constraints(i, j) * x[j]));
    }
    const bool eq = !lp.equality.empty() && lp.equality[i] != 0;
    const double slack = lp.rhs[i] - lhs;
    if (slack < -tol::kFeas * scale) return false;
    if (eq && slack > tol::kFeas * scale) return false;
  }
  return true;
}

bool certify_unbounded(const LinearProgram& lp, const Vec& ray) {
  const std::size_t d = lp.objective.size();
  double rn = 0.0;
  for (double v : ray) rn = std::max(rn, std::abs(v));
  if (!(rn > 0.0)) return false;
  double gain = 0.0;
  for (std::size_t j = 0; j < d; ++j) gain += lp.objective[j] * ray[j];
  if (gain <= tol::kFeas * rn) return false;
  for (std::size_t i = 0; i < lp.constraints.rows(); ++i) {
    double along = 0.0, scale = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      along += lp.constraints(i, j) * ray[j];
      scale = std::max(scale, std::abs(lp.constraints(i, j)));
    }
    const bool eq = !lp.equality.empty() && lp.equality[i] != 0;
    if (along > tol::kFeas * scale * rn) return false;
    if (eq && along < -tol::kFeas * scale * rn) return false;
  }
  return true;
}

}  // namespace

LPOutcome solve_lp(const LinearProgram& lp) {
  const std::size_t d = lp.objective.size();
  const std::size_t m = lp.constraints.rows();
  if (lp.constraints.cols() != d || lp.rhs.size() != m ||
      (!lp.equality.empty() && lp.equality.size() != m))
    throw MalformedProgram("solve_lp: dimension mismatch");
  if (!lp.constraints.finite())
    throw MalformedProgram("solve_lp: non-finite constraint entry");
  for (double v : lp.objective)
    if (!std::isfinite(v)) throw MalformedProgram("solve_lp: non-finite objective");
  for (double v : lp.rhs)
    if (!std::isfinite(v)) throw MalformedProgram("solve_lp: non-finite rhs");

  const auto certified = [&](const Attempt& a) {
    if (a.stuck) return false;
    if (a.status == LPStatus::Optimal) return certify_optimal(lp, a.x);
    if (a.status == LPStatus::Unbounded) return certify_unbounded(lp, a.ray);
    return true;  // Infeasible carries no cheap certificate
  };

  Attempt a = solve_once<double>(lp, 0.0);
  if (!certified(a)) a = solve_once<double>(lp, 1e-11);
  if (!certified(a)) a = solve_once<long double>(lp, 0.0);
  if (!certified(a)) a = solve_once<long double>(lp, 1e-11);
  if (!certified(a)) throw Error("solve_lp: no verdict survived certification");

  LPOutcome out;
  out.status = a.status;
  if (a.status == LPStatus::Optimal) {
    out.optimizer = std::move(a.x);
    out.value = dot(lp.objective, out.optimizer);
  } else if (a.status == LPStatus::Unbounded) {
    out.ray = std::move(a.ray);
  }
  return out;
}

}  // namespace scencert
