#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "scencert/linprog.hpp"
#include "scencert/matrix.hpp"

#include "json.hpp"

namespace scencert {

// One halfspace `normal . x <= offset`, optionally tagged with the index
// of the uncertainty sample it came from.
struct Halfspace {
  Vec normal;
  double offset = 0.0;
  std::optional<std::size_t> sample;
};

// H-representation polytope over R^dim.
class Polytope {
 public:
  explicit Polytope(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return rows_.size(); }
  const Halfspace& row(std::size_t i) const { return rows_[i]; }
  const std::vector<Halfspace>& rows() const { return rows_; }

  void add(Vec normal, double offset, std::optional<std::size_t> sample = {});
  void add(const Halfspace& h) { add(h.normal, h.offset, h.sample); }

  static Polytope box(const Vec& lo, const Vec& hi);

  nlohmann::json to_json() const;
  static Polytope from_json(const nlohmann::json& j);

 private:
  std::size_t dim_;
  std::vector<Halfspace> rows_;
};

// Sample indices whose constraints shape the set; `indices` is sorted
// and duplicate-free.
struct SupportSubsample {
  std::vector<std::size_t> indices;
  std::size_t cardinality() const { return indices.size(); }
};

struct SupportEval {
  LPStatus status = LPStatus::Infeasible;
  double value = 0.0;
  Vec maximizer;
};

// Same feasible set with one row per constraint direction: rows are
// unit-normalized, exact duplicates collapse to their first occurrence
// and same-direction rows collapse to the smallest offset (the others
// are redundant by dominance). Provenance follows the surviving row.
Polytope dedup_dominance(const Polytope& poly);

// sup { direction . x : x in poly }. Large row counts are handled by lazy
// row generation, so the cost scales with the number of binding rows.
SupportEval support_value(const Polytope& poly, const Vec& direction);

// Largest inscribed ball via the auxiliary LP
//   maximize r  s.t.  g_i . x + |g_i| r <= h_i.
// Throws InfeasibleSet when the polytope is empty.
std::pair<Vec, double> chebyshev_center(const Polytope& poly);

// True iff dropping row `idx` leaves the feasible set unchanged:
// max{ a_idx . x : all other rows } <= b_idx + feasTol.
bool is_redundant(const Polytope& poly, std::size_t idx);

// One redundancy LP per (deduplicated) constraint; a sample index is kept
// iff at least one of its constraints is non-redundant.
SupportSubsample naive_support_subsample(const Polytope& poly);

// Clarkson's output-sensitive scheme: candidates are tested by an LP over
// the current essential set only; when the test optimizer violates the
// candidate, a ray from the Chebyshev center towards the optimizer locates
// the first-hit constraint, which is promoted to essential.
SupportSubsample clarkson_support_subsample(const Polytope& poly);

// True iff some point of `poly` violates `test`:
// sup{ a_test . x : x in poly } > b_test + feasTol.
bool set_violates(const Polytope& poly, const Halfspace& test);

}  // namespace scencert
