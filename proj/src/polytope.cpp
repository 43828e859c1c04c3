#include "scencert/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "scencert/errors.hpp"
#include "scencert/numeric.hpp"
#include "scencert/parallel.hpp"

namespace scencert {

namespace {

constexpr std::size_t kDirectRows = 1024;  // below this, solve in one LP
constexpr std::size_t kGrowBatch = 8;      // rows added per sifting round

// Unit-normalized surviving constraints after deduplication. Constraints
// sharing a direction are collapsed to the smallest offset (the others
// cannot be facets); trivially-true rows with zero normal are dropped.
struct Screened {
  std::vector<Vec> unit;       // |normal| = 1
  std::vector<double> offset;  // offset / |normal|
  std::vector<std::optional<std::size_t>> sample;
  std::vector<std::size_t> origin;  // original row index of the survivor
};

Screened screen(const Polytope& poly) {
  Screened s;
  std::map<Vec, std::size_t> exact;  // unit normal -> candidate slot
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Halfspace& h = poly.row(i);
    const double nrm = norm2(h.normal);
    if (nrm <= tol::kPivot) {
      if (h.offset < -tol::kFeas)
        throw InfeasibleSet("polytope carries an explicit infeasibility marker");
      continue;
    }
    Vec u(h.normal);
    for (double& v : u) v /= nrm;
    const double ub = h.offset / nrm;

    std::size_t slot = s.unit.size();
    if (auto it = exact.find(u); it != exact.end()) {
      slot = it->second;
    } else {
      for (std::size_t g = 0; g < s.unit.size(); ++g) {
        double dmax = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k)
          dmax = std::max(dmax, std::abs(u[k] - s.unit[g][k]));
        if (dmax <= tol::kDedupAngle) {
          slot = g;
          break;
        }
      }
    }
    if (slot == s.unit.size()) {
      exact.emplace(u, slot);
      s.unit.push_back(std::move(u));
      s.offset.push_back(ub);
      s.sample.push_back(h.sample);
      s.origin.push_back(i);
    } else if (ub < s.offset[slot] - tol::kDedupOffset) {
      // strictly tighter same-direction constraint dominates
      s.offset[slot] = ub;
      s.sample[slot] = h.sample;
      s.origin[slot] = i;
    }
  }
  return s;
}

LinearProgram lp_over(const Screened& s, const std::vector<std::size_t>& rows,
                      const Vec& objective) {
  const std::size_t d = objective.size();
  LinearProgram lp;
  lp.objective = objective;
  lp.constraints = Matrix(rows.size(), d);
  lp.rhs.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t j = 0; j < d; ++j) lp.constraints(r, j) = s.unit[rows[r]][j];
    lp.rhs[r] = s.offset[rows[r]];
  }
  return lp;
}

// Deterministically appends the <= kGrowBatch most violated rows.
bool grow_active(const Screened& s, std::vector<std::uint8_t>& in_active,
                 std::vector<std::size_t>& active, const Vec& x, double shift) {
  std::vector<std::pair<double, std::size_t>> viol;
  for (std::size_t j = 0; j < s.unit.size(); ++j) {
    if (in_active[j]) continue;
    const double v = dot(s.unit[j], x) + shift - s.offset[j];
    if (v > tol::kFeas * std::max(1.0, std::abs(s.offset[j])))
      viol.emplace_back(-v, j);  // keyed for ascending sort = descending violation
  }
  if (viol.empty()) return false;
  std::sort(viol.begin(), viol.end());
  const std::size_t take = std::min(viol.size(), kGrowBatch);
  for (std::size_t k = 0; k < take; ++k) {
    active.push_back(viol[k].second);
    in_active[viol[k].second] = 1;
  }
  std::sort(active.begin(), active.end());
  return true;
}

}  // namespace

void Polytope::add(Vec normal, double offset, std::optional<std::size_t> sample) {
  if (normal.size() != dim_)
    throw DimensionMismatch("Polytope::add: normal dimension mismatch");
  rows_.push_back(Halfspace{std::move(normal), offset, sample});
}

Polytope Polytope::box(const Vec& lo, const Vec& hi) {
  Polytope p(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    Vec e(lo.size(), 0.0);
    e[i] = 1.0;
    p.add(e, hi[i]);
    e[i] = -1.0;
    p.add(e, -lo[i]);
  }
  return p;
}

nlohmann::json Polytope::to_json() const {
  nlohmann::json cons = nlohmann::json::array();
  for (const Halfspace& h : rows_) {
    nlohmann::json c;
    c["a"] = h.normal;
    c["b"] = h.offset;
    c["sample"] = h.sample ? nlohmann::json(*h.sample) : nlohmann::json(nullptr);
    cons.push_back(std::move(c));
  }
  return nlohmann::json{{"d", dim_}, {"constraints", std::move(cons)}};
}

Polytope Polytope::from_json(const nlohmann::json& j) {
  Polytope p(j.at("d").get<std::size_t>());
  for (const auto& c : j.at("constraints")) {
    std::optional<std::size_t> sample;
    if (c.contains("sample") && !c.at("sample").is_null())
      sample = c.at("sample").get<std::size_t>();
    p.add(c.at("a").get<Vec>(), c.at("b").get<double>(), sample);
  }
  return p;
}

Polytope dedup_dominance(const Polytope& poly) {
  const Screened s = screen(poly);
  Polytope out(poly.dim());
  for (std::size_t j = 0; j < s.unit.size(); ++j)
    out.add(s.unit[j], s.offset[j], s.sample[j]);
  return out;
}

SupportEval support_value(const Polytope& poly, const Vec& direction) {
  if (direction.size() != poly.dim())
    throw DimensionMismatch("support_value: direction dimension mismatch");
  const Screened s = screen(poly);
  const std::size_t total = s.unit.size();

  std::vector<std::size_t> active;
  std::vector<std::uint8_t> in_active(total, 0);
  if (total <= kDirectRows) {
    active.resize(total);
    for (std::size_t j = 0; j < total; ++j) {
      active[j] = j;
      in_active[j] = 1;
    }
  }

  for (std::size_t round = 0; round <= total + 2; ++round) {
    const LPOutcome out = solve_lp(lp_over(s, active, direction));
    if (out.status == LPStatus::Infeasible)
      throw InfeasibleSet("support_value over an empty polytope");
    if (out.status == LPStatus::Unbounded) {
      // admit only rows that block the improving ray
      const double rn = norm2(out.ray);
      std::size_t best = total;
      double best_score = tol::kPivot * std::max(1.0, rn);
      for (std::size_t j = 0; j < total; ++j) {
        if (in_active[j]) continue;
        const double sc = dot(s.unit[j], out.ray);
        if (sc > best_score) {
          best_score = sc;
          best = j;
        }
      }
      if (best == total) return {LPStatus::Unbounded, 0.0, {}};
      active.push_back(best);
      in_active[best] = 1;
      std::sort(active.begin(), active.end());
      continue;
    }
    if (!grow_active(s, in_active, active, out.optimizer, 0.0))
      return {LPStatus::Optimal, out.value, out.optimizer};
  }
  throw Error("support_value: row generation failed to settle");
}

std::pair<Vec, double> chebyshev_center(const Polytope& poly) {
  if (poly.size() == 0)
    throw MalformedProgram("chebyshev_center: polytope has no constraints");
  const Screened s = screen(poly);
  const std::size_t total = s.unit.size();
  const std::size_t d = poly.dim();

  std::vector<std::size_t> active;
  std::vector<std::uint8_t> in_active(total, 0);
  if (total <= kDirectRows) {
    active.resize(total);
    for (std::size_t j = 0; j < total; ++j) {
      active[j] = j;
      in_active[j] = 1;
    }
  }

  Vec objective(d + 1, 0.0);
  objective[d] = 1.0;

  for (std::size_t round = 0; round <= total + 2; ++round) {
    // rows are unit-normalized, so the ball term is plain "+ r"
    LinearProgram lp;
    lp.objective = objective;
    lp.constraints = Matrix(active.size() + 1, d + 1);
    lp.rhs.resize(active.size() + 1);
    for (std::size_t r = 0; r < active.size(); ++r) {
      for (std::size_t j = 0; j < d; ++j) lp.constraints(r, j) = s.unit[active[r]][j];
      lp.constraints(r, d) = 1.0;
      lp.rhs[r] = s.offset[active[r]];
    }
    lp.constraints(active.size(), d) = 1.0;  // radius cap keeps the LP bounded
    lp.rhs[active.size()] = tol::kRadiusCap;

    const LPOutcome out = solve_lp(lp);
    if (out.status != LPStatus::Optimal)
      throw Error("chebyshev_center: auxiliary LP did not solve");
    Vec x(out.optimizer.begin(), out.optimizer.begin() + d);
    const double r = out.optimizer[d];
    if (grow_active(s, in_active, active, x, r)) continue;
    if (r < -tol::kFeas) throw InfeasibleSet("chebyshev_center: polytope is empty");
    return {std::move(x), std::max(r, 0.0)};
  }
  throw Error("chebyshev_center: row generation failed to settle");
}

bool is_redundant(const Polytope& poly, std::size_t idx) {
  if (idx >= poly.size()) throw MalformedProgram("is_redundant: bad constraint index");
  const Halfspace& probe = poly.row(idx);
  Polytope others(poly.dim());
  for (std::size_t i = 0; i < poly.size(); ++i)
    if (i != idx) others.add(poly.row(i));
  // objective bound keeps the test LP bounded in the probe direction
  others.add(probe.normal, probe.offset + 1.0 + std::abs(probe.offset));

  const SupportEval sup = support_value(others, probe.normal);
  if (sup.status == LPStatus::Infeasible)
    throw InfeasibleSet("is_redundant: polytope is empty");
  return sup.value <= probe.offset + tol::kFeas;
}

SupportSubsample naive_support_subsample(const Polytope& poly) {
  chebyshev_center(poly);  // emptiness gate: throws InfeasibleSet
  const Screened s = screen(poly);
  const std::size_t total = s.unit.size();

  std::vector<std::uint8_t> redundant(total, 0);
  parallel_for(total, [&](std::size_t j) {
    Polytope others(poly.dim());
    for (std::size_t i = 0; i < total; ++i)
      if (i != j) others.add(s.unit[i], s.offset[i]);
    others.add(s.unit[j], s.offset[j] + 1.0 + std::abs(s.offset[j]));
    const SupportEval sup = support_value(others, s.unit[j]);
    redundant[j] = sup.status == LPStatus::Optimal &&
                   sup.value <= s.offset[j] + tol::kFeas;
  });

  SupportSubsample out;
  for (std::size_t j = 0; j < total; ++j)
    if (!redundant[j] && s.sample[j]) out.indices.push_back(*s.sample[j]);
  std::sort(out.indices.begin(), out.indices.end());
  out.indices.erase(std::unique(out.indices.begin(), out.indices.end()),
                    out.indices.end());
  return out;
}

SupportSubsample clarkson_support_subsample(const Polytope& poly) {
  const auto [center, radius] = chebyshev_center(poly);
  if (radius <= tol::kFeas)
    throw DegenerateInterior("clarkson_support_subsample: interior too thin");

  const Screened s = screen(poly);
  const std::size_t total = s.unit.size();
  std::vector<std::uint8_t> essential(total, 0);
  std::vector<std::size_t> ess_rows;

  for (std::size_t j = 0; j < total; ++j) {
    if (essential[j]) continue;
    for (std::size_t guard = 0; guard <= total + 1; ++guard) {
      // candidate test against the essential rows only
      std::vector<std::size_t> rows = ess_rows;
      rows.push_back(j);  // stands in for the objective bound below
      LinearProgram lp = lp_over(s, rows, s.unit[j]);
      lp.rhs[rows.size() - 1] = s.offset[j] + 1.0 + std::abs(s.offset[j]);
      const LPOutcome out = solve_lp(lp);
      if (out.status != LPStatus::Optimal)
        throw Error("clarkson_support_subsample: candidate LP did not solve");
      if (out.value <= s.offset[j] + tol::kFeas) break;  // redundant

      // ray-shoot from the Chebyshev center towards the violating optimizer
      Vec dir(poly.dim());
      for (std::size_t k = 0; k < dir.size(); ++k)
        dir[k] = out.optimizer[k] - center[k];
      double tmin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < total; ++i) {
        const double denom = dot(s.unit[i], dir);
        if (denom <= tol::kPivot) continue;
        tmin = std::min(tmin, (s.offset[i] - dot(s.unit[i], center)) / denom);
      }
      std::size_t hit = total;
      for (std::size_t i = 0; i < total; ++i) {
        const double denom = dot(s.unit[i], dir);
        if (denom <= tol::kPivot) continue;
        const double ti = (s.offset[i] - dot(s.unit[i], center)) / denom;
        if (ti <= tmin + tol::kRayTie) {  // ties promote the lower index
          hit = i;
          break;
        }
      }
      if (hit == total || essential[hit]) {
        // numerically ambiguous shot: keep the candidate, conservatively
        essential[j] = 1;
        ess_rows.push_back(j);
        std::sort(ess_rows.begin(), ess_rows.end());
        break;
      }
      essential[hit] = 1;
      ess_rows.push_back(hit);
      std::sort(ess_rows.begin(), ess_rows.end());
      if (hit == j) break;
    }
  }

  SupportSubsample out;
  for (std::size_t j = 0; j < total; ++j)
    if (essential[j] && s.sample[j]) out.indices.push_back(*s.sample[j]);
  std::sort(out.indices.begin(), out.indices.end());
  out.indices.erase(std::unique(out.indices.begin(), out.indices.end()),
                    out.indices.end());
  return out;
}

bool set_violates(const Polytope& poly, const Halfspace& test) {
  const SupportEval sup = support_value(poly, test.normal);
  if (sup.status == LPStatus::Unbounded)
    throw UnboundedSet("set_violates: supporting LP is unbounded");
  if (sup.status == LPStatus::Infeasible)
    throw InfeasibleSet("set_violates: polytope is empty");
  return sup.value > test.offset + tol::kFeas;
}

}  // namespace scencert
