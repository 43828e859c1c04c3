#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "scencert/certificates.hpp"
#include "scencert/errors.hpp"
#include "scencert/sampling.hpp"

using namespace scencert;

namespace {

// Independent log-domain summation oracle for the wait-and-judge identity:
//   sum_{k=0}^{M-1} C(M,k) (1 - eps(k))^{M-k}
// evaluated with lgamma/log1p directly and Neumaier compensation.
double residual_sum(std::size_t M, double beta) {
  std::vector<double> logs(M);
  for (std::size_t k = 0; k < M; ++k) {
    const double lc = std::lgamma(double(M) + 1.0) - std::lgamma(double(k) + 1.0) -
                      std::lgamma(double(M - k) + 1.0);
    logs[k] = lc + double(M - k) * log1m_epsilon_posteriori(M, k, beta);
  }
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : logs) mx = std::max(mx, v);
  double sum = 0.0, comp = 0.0;
  for (double v : logs) {
    const double term = std::exp(v - mx);
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return std::exp(mx) * (sum + comp);
}

}  // namespace

TEST_CASE("wait-and-judge level at full support is one") {
  CHECK(epsilon_posteriori(10, 10, 0.1) == 1.0);
  CHECK(epsilon_posteriori(5000, 5000, 1e-6) == 1.0);
}

TEST_CASE("wait-and-judge closed form at k = 0") {
  // eps(0) = 1 - (beta/M)^{1/M}
  const double expect = 1.0 - std::pow(0.01, 0.1);
  CHECK(epsilon_posteriori(10, 0, 0.1) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(epsilon_posteriori(10, 0, 0.1) == doctest::Approx(0.369043).epsilon(1e-5));
}

TEST_CASE("wait-and-judge family satisfies its defining identity") {
  for (const auto& [M, beta] :
       std::vector<std::pair<std::size_t, double>>{{100, 1e-3}, {1000, 1e-6}}) {
    const double sum = residual_sum(M, beta);
    CHECK(std::abs(sum - beta) / beta < 1e-9);
  }
}

TEST_CASE("wait-and-judge domain guards") {
  CHECK_THROWS_AS(epsilon_posteriori(10, 11, 0.1), DomainError);
  CHECK_THROWS_AS(epsilon_posteriori(10, 3, 0.0), DomainError);
  CHECK_THROWS_AS(epsilon_posteriori(10, 3, 1.0), DomainError);
}

TEST_CASE("binomial tail closed form at dim = 0") {
  CHECK(beta_apriori(100, 0.05, 0) ==
        doctest::Approx(std::pow(0.95, 100)).epsilon(1e-12));
  CHECK(beta_apriori(100, 0.05, 0) == doctest::Approx(0.0059205).epsilon(1e-4));
}

TEST_CASE("binomial tail tends to one as eps vanishes") {
  CHECK(beta_apriori(50, 1e-13, 3) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(beta_apriori(2000, 1e-13, 0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("the explicit level drives the tail below its confidence") {
  CHECK(beta_apriori(500, 0.0885, 12) <= 1e-6);
}

TEST_CASE("tail inversion closed form at dim = 0") {
  const double eps = epsilon_apriori(100, 0.01, 0);
  CHECK(eps == doctest::Approx(1.0 - std::pow(0.01, 0.01)).epsilon(1e-9));
  CHECK(eps == doctest::Approx(0.045007).epsilon(1e-4));
}

TEST_CASE("tail inversion round-trips") {
  SeededStream r(3, "roundtrip");
  for (int i = 0; i < 30; ++i) {
    const std::size_t M = 50 + std::size_t(r.uniform(0, 2000));
    const std::size_t dim = std::size_t(r.uniform(0, 20));
    const double beta = std::pow(10.0, -r.uniform(1.0, 8.0));
    const double eps = epsilon_apriori(M, beta, dim);
    CHECK(beta_apriori(M, eps, dim) == doctest::Approx(beta).epsilon(1e-7));
  }
}

TEST_CASE("exact inversion beats the explicit bound") {
  const double exact = epsilon_apriori(500, 1e-6, 12);
  CHECK(exact < 0.0885);
  CHECK(epsilon_explicit(500, 1e-6, 12) >= exact);
}

TEST_CASE("explicit sufficient level") {
  CHECK(epsilon_explicit(500, 1e-6, 12) == doctest::Approx(0.0885).epsilon(0.0012));
  CHECK(std::abs(epsilon_explicit(500, 1e-6, 12) - 0.0885) < 0.0001);
  CHECK(epsilon_explicit(100, 1.0, 0) == 0.0);
  CHECK(epsilon_explicit(1000, 1e-6, 12) == 0.5 * epsilon_explicit(500, 1e-6, 12));
}

TEST_CASE("smallest sufficient sample count") {
  CHECK(sample_size(0.1, 0.01, 0) == 44);  // ceil(ln beta / ln(1-eps))
  for (std::size_t d = 0; d < 8; ++d)
    CHECK(sample_size(0.05, 1e-4, d + 1) >= sample_size(0.05, 1e-4, d));
}

TEST_CASE("agent-independent vs dimension-scaled sample counts") {
  const std::size_t fixed = sample_size(0.0885, 1e-6, 12);
  std::size_t prev = 0;
  for (std::size_t N = 10; N <= 50; N += 10) {
    CHECK(sample_size(0.0885, 1e-6, 12) == fixed);
    const std::size_t grow = sample_size(0.0885, 1e-6, 12 * N);
    CHECK(grow > prev);
    prev = grow;
  }
  CHECK(fixed <= 500);
}

TEST_CASE("violation level grows with support cardinality") {
  const std::size_t M = 1000;
  double prev = -1.0;
  for (std::size_t k = 0; k < M; k += 13) {
    const double eps = epsilon_posteriori(M, k, 1e-6);
    CHECK(eps >= prev);
    prev = eps;
  }
}

TEST_CASE("violation level shrinks with more samples") {
  double prev = 1.0;
  for (std::size_t M : {200, 400, 800, 1600, 3200}) {
    const double eps = epsilon_posteriori(M, 100, 1e-6);
    CHECK(eps <= prev);
    prev = eps;
  }
}

TEST_CASE("log-gamma binomials stay finite at extreme sizes") {
  CHECK(std::isfinite(log_binomial(1000000, 500000)));
  CHECK(std::isfinite(epsilon_posteriori(1000000, 500000, 1e-9)));
  CHECK(std::isfinite(beta_apriori(1000000, 0.01, 100)));
}

TEST_CASE("explicit bound dominates the exact inversion") {
  SeededStream r(8, "dominance");
  for (int i = 0; i < 30; ++i) {
    const std::size_t M = 100 + std::size_t(r.uniform(0, 5000));
    const std::size_t dim = std::size_t(r.uniform(0, 15));
    const double beta = std::pow(10.0, -r.uniform(1.0, 9.0));
    const double ex = epsilon_explicit(M, beta, dim);
    if (ex >= 1.0) continue;
    CHECK(ex >= epsilon_apriori(M, beta, dim) - 1e-12);
  }
}

TEST_CASE("certificate JSON round-trip") {
  Certificate c{CertificateKind::APosterioriSet, 2000, 39, 0.042, 1e-6};
  const auto j = c.to_json();
  CHECK(j.at("kind") == "APosterioriSet");
  CHECK(j.at("M") == 2000);
  const Certificate d = Certificate::from_json(j);
  CHECK(d.kind == c.kind);
  CHECK(d.samples == c.samples);
  CHECK(d.support == c.support);
  CHECK(d.epsilon == c.epsilon);
  CHECK(d.beta == c.beta);
}
