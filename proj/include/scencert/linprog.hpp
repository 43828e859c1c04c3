#pragma once

#include <cstdint>
#include <vector>

#include "scencert/matrix.hpp"

namespace scencert {

// maximize objective . x  subject to  constraints * x <= rhs
// (rows flagged in `equality` hold with equality). Variables are free.
struct LinearProgram {
  Vec objective;
  Matrix constraints;
  Vec rhs;
  std::vector<std::uint8_t> equality;  // optional, one flag per row
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPOutcome {
  LPStatus status = LPStatus::Infeasible;
  Vec optimizer;  // set when Optimal
  double value = 0.0;
  Vec ray;  // improving direction, set when Unbounded
};

// Two-phase dense simplex with Bland's pivot rule. Deterministic:
// identical inputs give bitwise-identical outcomes.
LPOutcome solve_lp(const LinearProgram& lp);

}  // namespace scencert
