#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "scencert/aggregative.hpp"
#include "scencert/errors.hpp"
#include "scencert/sampling.hpp"

using namespace scencert;

namespace {

AggregativeProgram scalar_program(double x_lo, double x_hi, double a0, double b0v) {
  AggregativeProgram p;
  p.agents = 1;
  p.dim = 1;
  p.A0 = Matrix(1, 1);
  p.A0(0, 0) = a0;
  p.b0 = {b0v};
  p.domain = Polytope::box({x_lo}, {x_hi});
  return p;
}

// random symmetric positive definite matrix with unit-order spectrum
Matrix random_spd(SeededStream& r, std::size_t n, double ridge) {
  Matrix b(n, n);
  for (auto& v : b.data()) v = r.uniform(-1.0, 1.0);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += b(k, i) * b(k, j);
      a(i, j) = s / double(n);
    }
  for (std::size_t i = 0; i < n; ++i) a(i, i) += ridge;
  return a;
}

// product-of-boxes domain with one minimum-total row per agent
Polytope agent_boxes(std::size_t agents, std::size_t n, double lo, double hi,
                     double min_total) {
  Polytope p(agents * n);
  for (std::size_t i = 0; i < agents; ++i) {
    for (std::size_t t = 0; t < n; ++t) {
      Vec e(agents * n, 0.0);
      e[i * n + t] = 1.0;
      p.add(e, hi);
      e[i * n + t] = -1.0;
      p.add(e, -lo);
    }
    Vec sum(agents * n, 0.0);
    for (std::size_t t = 0; t < n; ++t) sum[i * n + t] = -1.0;
    p.add(sum, -min_total);
  }
  return p;
}

AggregativeProgram random_program(SeededStream& r, std::size_t agents,
                                  std::size_t n, std::size_t M) {
  AggregativeProgram p;
  p.agents = agents;
  p.dim = n;
  p.A0 = random_spd(r, n, 0.5);
  p.b0.resize(n);
  for (auto& v : p.b0) v = r.uniform(-1.0, 1.0);
  p.domain = agent_boxes(agents, n, 0.0, 2.0, 1.0);
  for (std::size_t m = 0; m < M; ++m) {
    CostSample s;
    s.A = random_spd(r, n, 0.2);
    s.b.resize(n);
    for (auto& v : s.b) v = r.uniform(-1.0, 1.0);
    p.samples.push_back(std::move(s));
  }
  return p;
}

}  // namespace

TEST_CASE("eval_g scalar and hand-worked cases") {
  AggregativeProgram p;
  p.agents = 2;
  p.dim = 1;
  p.A0 = Matrix::identity(1);
  p.b0 = {0.0};
  p.domain = Polytope::box({0, 0}, {2, 2});
  CostSample s{Matrix::identity(1), {0.0}};
  CHECK(eval_g(p, {1.0, 1.0}, s) == doctest::Approx(4.0));  // sigma=2, g=4
  CHECK(eval_g(p, {0.0, 0.0}, s) == 0.0);

  AggregativeProgram q;
  q.agents = 2;
  q.dim = 2;
  q.A0 = Matrix::identity(2);
  q.b0 = {0.0, 0.0};
  q.domain = Polytope::box({0, 0, 0, 0}, {2, 2, 2, 2});
  CostSample t{Matrix::identity(2), {1.0, 1.0}};
  // x1=(1,0), x2=(0,1): sigma=(1,1), g = |sigma|^2 + b.sigma = 2 + 2
  CHECK(eval_g(q, {1.0, 0.0, 0.0, 1.0}, t) == doctest::Approx(4.0));
  CHECK_THROWS_AS(eval_g(q, {1.0, 0.0}, t), DimensionMismatch);
}

TEST_CASE("solve_epigraph: 1-D analytic minimum") {
  // min max g = min x^2 over [1,4] -> x*=1, gamma*=1
  AggregativeProgram p = scalar_program(1.0, 4.0, 0.0, 0.0);
  p.samples.push_back({Matrix::identity(1), {0.0}});
  const EpigraphSolution sol = solve_epigraph(p, 1e-9);
  CHECK(sol.x_star[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.gamma_star == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.gap <= 1e-7);
}

TEST_CASE("solve_epigraph: no samples, interior quadratic minimum") {
  AggregativeProgram p;
  p.agents = 1;
  p.dim = 2;
  p.A0 = Matrix::identity(2);
  p.b0 = {0.0, 0.0};
  p.domain = Polytope::box({-1, -1}, {1, 1});
  const EpigraphSolution sol = solve_epigraph(p, 1e-9);
  CHECK(sol.value == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(std::abs(sol.x_star[0]) < 1e-4);
  CHECK(std::abs(sol.x_star[1]) < 1e-4);
  CHECK(sol.gamma_star == 0.0);
}

TEST_CASE("solve_epigraph agrees with a 400x400 grid oracle") {
  // two scalar agents in [0,2], each with minimum total 1, f = 0,
  // samples g1 = s^2, g2 = 2 s^2 - s
  AggregativeProgram p;
  p.agents = 2;
  p.dim = 1;
  p.A0 = Matrix(1, 1);
  p.b0 = {0.0};
  p.domain = agent_boxes(2, 1, 0.0, 2.0, 1.0);
  p.samples.push_back({Matrix::identity(1), {0.0}});
  CostSample second{Matrix(1, 1), {-1.0}};
  second.A(0, 0) = 2.0;
  p.samples.push_back(second);

  double grid_best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 400; ++i)
    for (int j = 0; j < 400; ++j) {  // grid over the feasible box [1,2]^2
      const double x1 = 1.0 + i / 399.0, x2 = 1.0 + j / 399.0;
      const double s = x1 + x2;
      grid_best = std::min(grid_best, std::max(s * s, 2 * s * s - s));
    }
  const EpigraphSolution sol = solve_epigraph(p, 1e-8);
  CHECK(std::abs(sol.value - grid_best) < 1e-4);
  CHECK(sol.value == doctest::Approx(6.0).epsilon(1e-6));  // s*=2
}

TEST_CASE("kelley bounds are monotone and ordered") {
  SeededStream r(21, "kelley");
  AggregativeProgram p = random_program(r, 3, 3, 12);
  KelleyTrace trace;
  const EpigraphSolution sol = solve_epigraph(p, 1e-8, &trace);
  REQUIRE(!trace.lower.empty());
  for (std::size_t i = 1; i < trace.lower.size(); ++i) {
    CHECK(trace.lower[i] >= trace.lower[i - 1] - 1e-9);
    CHECK(trace.upper[i] <= trace.upper[i - 1] + 1e-9);
    CHECK(trace.lower[i] <= trace.upper[i] + 1e-9 * std::max(1.0, std::abs(trace.upper[i])));
  }
  CHECK(sol.gap <= 1e-7 * std::max(1.0, std::abs(sol.value)));
}

TEST_CASE("solver determinism") {
  SeededStream r(77, "det");
  AggregativeProgram p = random_program(r, 2, 2, 8);
  const EpigraphSolution a = solve_epigraph(p, 1e-8);
  const EpigraphSolution b = solve_epigraph(p, 1e-8);
  CHECK(a.value == b.value);
  CHECK(a.gamma_star == b.gamma_star);
  for (std::size_t i = 0; i < a.x_star.size(); ++i)
    CHECK(a.x_star[i] == b.x_star[i]);
}

TEST_CASE("gamma_star is feasible for every sample") {
  SeededStream r(5, "feas");
  AggregativeProgram p = random_program(r, 2, 3, 15);
  const EpigraphSolution sol = solve_epigraph(p, 1e-8);
  for (const CostSample& s : p.samples)
    CHECK(eval_g(p, sol.x_star, s) <= sol.gamma_star + 1e-10);
  // x* feasible in the domain
  for (const Halfspace& h : p.domain.rows())
    CHECK(dot(h.normal, sol.x_star) <= h.offset + 1e-8);
}

TEST_CASE("infeasible domain is reported") {
  AggregativeProgram p = scalar_program(2.0, 1.0, 1.0, 0.0);  // empty box
  p.samples.push_back({Matrix::identity(1), {0.0}});
  CHECK_THROWS_AS(solve_epigraph(p, 1e-6), InfeasibleDomain);
}

TEST_CASE("count_support_constraints: single binding sample") {
  // f = s^2 - 6 s pulls towards s = 3; the lone sample g = s^2 pulls back
  AggregativeProgram p = scalar_program(1.0, 4.0, 1.0, -6.0);
  p.samples.push_back({Matrix::identity(1), {0.0}});
  CHECK(count_support_constraints(p, 1e-9) == 1);
}

TEST_CASE("count_support_constraints: duplicated samples support nothing") {
  AggregativeProgram p = scalar_program(1.0, 4.0, 1.0, -6.0);
  p.samples.push_back({Matrix::identity(1), {0.0}});
  p.samples.push_back({Matrix::identity(1), {0.0}});
  CHECK(count_support_constraints(p, 1e-9) == 0);
}

TEST_CASE("support count respects the dimension bound on random instances") {
  SeededStream rng(303, "support");
  for (const std::size_t agents : {2, 4}) {
    auto r = rng.derive("N", agents);
    AggregativeProgram p = random_program(r, agents, 3, 25);
    CHECK(count_support_constraints(p, 1e-8) <= 4);  // n + 1
  }
}

TEST_CASE("support-rank matrices: scalar construction") {
  AggregativeProgram p = scalar_program(0.0, 1.0, 1.0, 0.0);
  CostSample s{Matrix(1, 1), {0.5}};
  s.A(0, 0) = 2.0;
  const auto m = support_rank_matrices(p, {0.25}, s);
  REQUIRE(m.Q.rows() == 3);
  REQUIRE(m.Q.cols() == 2);
  CHECK(m.Q(0, 0) == 2.0);   // A
  CHECK(m.Q(0, 1) == 0.0);
  CHECK(m.Q(1, 0) == 0.0);   // padded epigraph row
  CHECK(m.Q(2, 0) == doctest::Approx(2 * 2.0 * 0.25 + 0.5));  // 2 A x + b
  CHECK(m.Q(2, 1) == -1.0);
}

TEST_CASE("support-rank matrices: zero data and identity slope") {
  AggregativeProgram p;
  p.agents = 2;
  p.dim = 2;
  p.A0 = Matrix::identity(2);
  p.b0 = {0.0, 0.0};
  p.domain = Polytope::box({0, 0, 0, 0}, {1, 1, 1, 1});

  CostSample zero{Matrix(2, 2), {0.0, 0.0}};
  const auto mz = support_rank_matrices(p, {0, 0, 0, 0}, zero);
  CHECK(numeric_rank(mz.Q, 1e-10) == 1);  // only the -1 epigraph entry

  SeededStream r(11, "probe");
  CostSample eye{Matrix::identity(2), {r.uniform(-1, 1), r.uniform(-1, 1)}};
  Vec x(4);
  for (auto& v : x) v = r.uniform(-1, 1);
  const auto mi = support_rank_matrices(p, x, eye);
  CHECK(numeric_rank(mi.Q, 1e-10) == 3);  // n + 1
}

TEST_CASE("support rank bound holds across agent counts") {
  SeededStream rng(99, "rankbound");
  for (const std::size_t agents : {2, 4, 8, 16}) {
    auto r = rng.derive("N", agents);
    AggregativeProgram p;
    p.agents = agents;
    p.dim = 3;
    p.A0 = random_spd(r, 3, 0.3);
    p.b0 = {0.1, -0.2, 0.3};
    p.domain = agent_boxes(agents, 3, 0.0, 1.0, 0.5);
    for (int m = 0; m < 6; ++m) {
      CostSample s;
      s.A = random_spd(r, 3, 0.3);  // nonsingular
      s.b = {r.uniform(-1, 1), r.uniform(-1, 1), r.uniform(-1, 1)};
      p.samples.push_back(std::move(s));
    }
    CHECK(check_support_rank_bound(p, 12, 7));
    // all-zero slopes stay within the bound as well
    AggregativeProgram flat = p;
    for (auto& s : flat.samples) s.A = Matrix(3, 3);
    CHECK(check_support_rank_bound(flat, 12, 7));
  }
}

TEST_CASE("cost deterioration events") {
  SeededStream r(13, "events");
  AggregativeProgram p = random_program(r, 2, 2, 10);
  // shift intercepts up so the worst-case cost is positive at the optimum
  for (auto& s : p.samples)
    for (auto& v : s.b) v = std::abs(v) + 0.5;
  const EpigraphSolution sol = solve_epigraph(p, 1e-8);
  REQUIRE(sol.gamma_star > 0.0);

  // the argmax training sample never deteriorates the certified cost
  std::size_t arg = 0;
  double best = -1e300;
  for (std::size_t m = 0; m < p.samples.size(); ++m) {
    const double v = eval_g(p, sol.x_star, p.samples[m]);
    if (v > best) {
      best = v;
      arg = m;
    }
  }
  CHECK_FALSE(cost_deterioration_event(p, sol, p.samples[arg]));

  // a sample scaled far beyond the training set does
  CostSample big = p.samples[arg];
  for (auto& v : big.A.data()) v *= 10.0;
  for (auto& v : big.b) v *= 10.0;
  CHECK(cost_deterioration_event(p, sol, big));
}

TEST_CASE("three equivalent violation events agree sample by sample") {
  SeededStream r(29, "equiv");
  AggregativeProgram p = random_program(r, 2, 2, 12);
  const EpigraphSolution sol = solve_epigraph(p, 1e-8);
  double train_max = -std::numeric_limits<double>::infinity();
  for (const CostSample& s : p.samples)
    train_max = std::max(train_max, eval_g(p, sol.x_star, s));
  const double fls = eval_f(p, sol.x_star);

  auto probes = r.derive("test", 1);
  for (int t = 0; t < 4000; ++t) {
    CostSample s;
    s.A = random_spd(probes, 2, 0.0);
    for (auto& v : s.A.data()) v *= probes.uniform(0.0, 2.0);
    s.A(0, 1) = s.A(1, 0);  // keep symmetric after scaling
    s.b = {probes.uniform(-2, 2), probes.uniform(-2, 2)};
    const double g = eval_g(p, sol.x_star, s);
    const bool via_h = (g - sol.gamma_star) > 1e-8;
    const bool via_g = cost_deterioration_event(p, sol, s);
    const bool via_cost = (fls + std::max(g, train_max)) > (fls + train_max) + 1e-8;
    CHECK(via_h == via_g);
    CHECK(via_g == via_cost);
  }
}

TEST_CASE("sampled cost is midpoint convex along random segments") {
  SeededStream r(31, "convex");
  AggregativeProgram p = random_program(r, 2, 3, 1);
  const CostSample& s = p.samples[0];
  for (int t = 0; t < 200; ++t) {
    Vec a(6), b(6);
    for (auto& v : a) v = r.uniform(-3, 3);
    for (auto& v : b) v = r.uniform(-3, 3);
    Vec mid(6);
    for (int j = 0; j < 6; ++j) mid[j] = 0.5 * (a[j] + b[j]);
    const double lhs = eval_g(p, mid, s);
    const double rhs = 0.5 * eval_g(p, a, s) + 0.5 * eval_g(p, b, s);
    CHECK(lhs <= rhs + 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("analytic gradient matches central differences") {
  SeededStream r(37, "grad");
  AggregativeProgram p = random_program(r, 3, 2, 1);
  const CostSample& s = p.samples[0];
  for (int t = 0; t < 20; ++t) {
    Vec x(6);
    for (auto& v : x) v = r.uniform(-2, 2);
    const Vec g = grad_g(p, x, s);
    for (int j = 0; j < 6; ++j) {
      Vec hi(x), lo(x);
      hi[j] += 1e-6;
      lo[j] -= 1e-6;
      const double fd = (eval_g(p, hi, s) - eval_g(p, lo, s)) / 2e-6;
      CHECK(g[j] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("program JSON round-trip") {
  SeededStream r(43, "json");
  AggregativeProgram p = random_program(r, 2, 2, 3);
  const auto j = p.to_json();
  const AggregativeProgram q = AggregativeProgram::from_json(j);
  CHECK(q.agents == p.agents);
  CHECK(q.dim == p.dim);
  CHECK(q.samples.size() == p.samples.size());
  CHECK(q.A0.data() == p.A0.data());
  CHECK(q.domain.size() == p.domain.size());
  CHECK(q.samples[1].b == p.samples[1].b);
}
