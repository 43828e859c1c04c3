#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <optional>

#include "scencert/errors.hpp"
#include "scencert/linprog.hpp"
#include "scencert/matrix.hpp"
#include "scencert/polytope.hpp"
#include "scencert/sampling.hpp"

using namespace scencert;

namespace {

LinearProgram make_lp(const std::vector<Vec>& rows, const Vec& rhs, const Vec& c) {
  LinearProgram lp;
  lp.objective = c;
  lp.constraints = Matrix(rows.size(), c.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) lp.constraints(i, j) = rows[i][j];
  lp.rhs = rhs;
  return lp;
}

// Brute-force LP oracle: enumerate all d-subsets of rows, solve the square
// system, keep feasible vertices, take the best objective. Independent of
// the simplex path under test.
std::optional<Vec> solve_square(const std::vector<Vec>& rows, const Vec& rhs) {
  const std::size_t d = rows.size();
  std::vector<Vec> a(rows);
  Vec b(rhs);
  Vec x(d, 0.0);
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-10) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t j = col; j < d; ++j) a[r][j] -= f * a[col][j];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = 0; i < d; ++i) x[i] = b[i] / a[i][i];
  return x;
}

std::optional<double> vertex_enum_max(const std::vector<Vec>& rows,
                                      const Vec& rhs, const Vec& c) {
  const std::size_t m = rows.size(), d = c.size();
  std::optional<double> best;
  std::vector<std::size_t> pick(d);
  // iterate all d-combinations of row indices
  std::vector<std::size_t> idx(d);
  for (std::size_t i = 0; i < d; ++i) idx[i] = i;
  auto advance = [&]() -> bool {
    std::size_t k = d;
    while (k-- > 0) {
      if (idx[k] + (d - k) <= m - 1 + 0) {
        if (idx[k] + 1 + (d - 1 - k) <= m - 1) {
          ++idx[k];
          for (std::size_t j = k + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
          return true;
        }
      }
    }
    return false;
  };
  if (m < d) return std::nullopt;
  do {
    std::vector<Vec> sub(d);
    Vec subr(d);
    for (std::size_t i = 0; i < d; ++i) {
      sub[i] = rows[idx[i]];
      subr[i] = rhs[idx[i]];
    }
    const auto x = solve_square(sub, subr);
    if (!x) continue;
    bool feas = true;
    for (std::size_t r = 0; r < m && feas; ++r) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < d; ++j) lhs += rows[r][j] * (*x)[j];
      if (lhs > rhs[r] + 1e-7) feas = false;
    }
    if (!feas) continue;
    double val = 0.0;
    for (std::size_t j = 0; j < d; ++j) val += c[j] * (*x)[j];
    if (!best || val > *best) best = val;
  } while (advance());
  return best;
}

}  // namespace

TEST_CASE("unit box corner") {
  const auto lp = make_lp({{1, 0}, {0, 1}, {-1, 0}, {0, -1}},
                          {1, 1, 0, 0}, {1, 1});
  const LPOutcome out = solve_lp(lp);
  REQUIRE(out.status == LPStatus::Optimal);
  CHECK(out.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(out.optimizer[0] == doctest::Approx(1.0));
  CHECK(out.optimizer[1] == doctest::Approx(1.0));
}

TEST_CASE("unbounded ray") {
  const auto lp = make_lp({{-1.0}}, {0.0}, {1.0});
  const LPOutcome out = solve_lp(lp);
  REQUIRE(out.status == LPStatus::Unbounded);
  REQUIRE(out.ray.size() == 1);
  CHECK(out.ray[0] > 0.0);
}

TEST_CASE("empty intersection") {
  const auto lp = make_lp({{1.0}, {-1.0}}, {0.0, -1.0}, {1.0});
  CHECK(solve_lp(lp).status == LPStatus::Infeasible);
}

TEST_CASE("equality rows honoured") {
  // max x + y s.t. x + y = 1, x <= 0.75, -x <= 0, -y <= 0
  auto lp = make_lp({{1, 1}, {1, 0}, {-1, 0}, {0, -1}}, {1, 0.75, 0, 0}, {1, 1});
  lp.equality = {1, 0, 0, 0};
  const LPOutcome out = solve_lp(lp);
  REQUIRE(out.status == LPStatus::Optimal);
  CHECK(out.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("malformed programs rejected") {
  auto lp = make_lp({{1, 0}}, {1}, {1, 1});
  lp.rhs = {1, 2};  // row count mismatch
  CHECK_THROWS_AS(solve_lp(lp), MalformedProgram);
  auto bad = make_lp({{1, 0}}, {1}, {1, 1});
  bad.objective[0] = std::nan("");
  CHECK_THROWS_AS(solve_lp(bad), MalformedProgram);
}

TEST_CASE("simplex matches vertex-enumeration oracle") {
  SeededStream rng(1234, "lp-oracle");
  int solved = 0;
  for (int inst = 0; inst < 120; ++inst) {
    auto r = rng.derive("inst", inst);
    const std::size_t d = 1 + std::size_t(r.uniform(0, 3));
    std::vector<Vec> rows;
    Vec rhs;
    for (std::size_t j = 0; j < d; ++j) {  // bounding box keeps it compact
      Vec e(d, 0.0);
      e[j] = 1.0;
      rows.push_back(e);
      rhs.push_back(r.uniform(0.5, 2.0));
      e[j] = -1.0;
      rows.push_back(e);
      rhs.push_back(r.uniform(0.5, 2.0));
    }
    const std::size_t extra = std::min<std::size_t>(10 - rows.size(), 4);
    for (std::size_t k = 0; k < extra; ++k) {
      Vec a(d);
      for (auto& v : a) v = r.gaussian(0, 1);
      rows.push_back(a);
      rhs.push_back(r.uniform(0.2, 1.5));  // keeps the origin feasible
    }
    Vec c(d);
    for (auto& v : c) v = r.gaussian(0, 1);
    const auto lp = make_lp(rows, rhs, c);
    const LPOutcome out = solve_lp(lp);
    REQUIRE(out.status == LPStatus::Optimal);
    const auto oracle = vertex_enum_max(rows, rhs, c);
    REQUIRE(oracle.has_value());
    CHECK(std::abs(out.value - *oracle) < 1e-7);
    // feasibility of the reported optimizer
    for (std::size_t i = 0; i < rows.size(); ++i)
      CHECK(dot(rows[i], out.optimizer) <= rhs[i] + 1e-8);
    ++solved;
  }
  CHECK(solved == 120);
}

TEST_CASE("solve_lp is a pure function (bitwise-identical reruns)") {
  SeededStream r(99, "det");
  Vec c = {r.gaussian(0, 1), r.gaussian(0, 1)};
  auto lp = make_lp({{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}},
                    {1, 1, 0, 0, 1.3}, c);
  const LPOutcome a = solve_lp(lp);
  const LPOutcome b = solve_lp(lp);
  REQUIRE(a.status == b.status);
  REQUIRE(a.optimizer.size() == b.optimizer.size());
  CHECK(a.value == b.value);
  for (std::size_t i = 0; i < a.optimizer.size(); ++i)
    CHECK(a.optimizer[i] == b.optimizer[i]);
}

TEST_CASE("chebyshev center: unit square") {
  const Polytope p = Polytope::box({0, 0}, {1, 1});
  const auto [c, r] = chebyshev_center(p);
  CHECK(c[0] == doctest::Approx(0.5));
  CHECK(c[1] == doctest::Approx(0.5));
  CHECK(r == doctest::Approx(0.5));
}

TEST_CASE("chebyshev center: 1-D segment") {
  const Polytope p = Polytope::box({0}, {2});
  const auto [c, r] = chebyshev_center(p);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(r == doctest::Approx(1.0));
}

TEST_CASE("chebyshev center: right isoceles triangle incircle") {
  Polytope p(2);
  p.add({-1, 0}, 0);
  p.add({0, -1}, 0);
  p.add({1, 1}, 1);
  const auto [c, r] = chebyshev_center(p);
  CHECK(r == doctest::Approx((2.0 - std::sqrt(2.0)) / 2.0).epsilon(1e-9));
  CHECK(c[0] == doctest::Approx(r));
  CHECK(c[1] == doctest::Approx(r));
}

TEST_CASE("chebyshev center: empty polytope throws") {
  Polytope p(1);
  p.add({1}, 0);
  p.add({-1}, -1);  // x >= 1 and x <= 0
  CHECK_THROWS_AS(chebyshev_center(p), InfeasibleSet);
}

TEST_CASE("numeric_rank basics") {
  CHECK(numeric_rank(Matrix::identity(3), 1e-10) == 3);
  Matrix ones(2, 2, 1.0);
  CHECK(numeric_rank(ones, 1e-10) == 1);
}

TEST_CASE("numeric_rank of the stacked quadratic-form matrix") {
  // N=2, n=2, A = I2, b = 0, x = 0: rank must equal n+1 = 3
  const Matrix atil = Matrix::ones_kron(2, 2, Matrix::identity(2));
  Matrix q(6, 5);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) q(i, j) = atil(i, j);
  // row 4 is the zero row of the padded block; row 5 = (0,0,0,0,-1)
  q(5, 4) = -1.0;
  CHECK(numeric_rank(q, 1e-10) == 3);
}

TEST_CASE("rank is transpose-invariant") {
  SeededStream rng(5, "rank");
  for (int inst = 0; inst < 50; ++inst) {
    auto r = rng.derive("m", inst);
    const std::size_t rows = 1 + std::size_t(r.uniform(0, 6));
    const std::size_t cols = 1 + std::size_t(r.uniform(0, 6));
    const std::size_t rk = std::min({rows, cols, 1 + std::size_t(r.uniform(0, 4))});
    // build rows x cols matrix of known rank rk as a product of factors
    Matrix left(rows, rk), right(rk, cols);
    for (auto& v : left.data()) v = r.gaussian(0, 1);
    for (auto& v : right.data()) v = r.gaussian(0, 1);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        double s = 0;
        for (std::size_t k = 0; k < rk; ++k) s += left(i, k) * right(k, j);
        m(i, j) = s;
      }
    CHECK(numeric_rank(m, 1e-8) == numeric_rank(m.transposed(), 1e-8));
  }
}
