#pragma once

#include <cstddef>
#include <string>

#include "json.hpp"

namespace scencert {

enum class CertificateKind { APosterioriSet, APrioriPoint };

// (M, k, epsilon, beta): with confidence 1 - beta, the violation
// probability of the certified object is at most epsilon.
struct Certificate {
  CertificateKind kind = CertificateKind::APosterioriSet;
  std::size_t samples = 0;  // M
  std::size_t support = 0;  // k: support cardinality, or the dimension bound
  double epsilon = 0.0;
  double beta = 0.0;

  nlohmann::json to_json() const;
  static Certificate from_json(const nlohmann::json& j);
};

// log C(n, k) via lgamma; safe far beyond n = 1e6.
double log_binomial(std::size_t n, std::size_t k);

// Wait-and-judge violation level: the canonical family satisfying
//   eps(M) = 1,   sum_{k<M} C(M,k) (1 - eps(k))^{M-k} = beta
// with the uniform beta/M split per term, which gives the closed form
//   eps(k) = 1 - (beta / (M C(M,k)))^{1/(M-k)}.
double epsilon_posteriori(std::size_t M, std::size_t k, double beta);

// log(1 - eps(k)) without leaving the log domain; -inf at k = M. For k
// close to M the complement underflows double precision, so identity
// checks must be run through this form.
double log1m_epsilon_posteriori(std::size_t M, std::size_t k, double beta);

// Binomial lower tail  sum_{j<=dim} C(M,j) eps^j (1-eps)^{M-j},
// evaluated in the log domain with compensated summation.
double beta_apriori(std::size_t M, double eps, std::size_t dim);

// Unique eps in (0,1) with beta_apriori(M, eps, dim) = beta (bisection;
// the tail is strictly decreasing in eps).
double epsilon_apriori(std::size_t M, double beta, std::size_t dim);

// Explicit sufficient level (2/M) (ln(1/beta) + dim ln 2); always at
// least as large as epsilon_apriori when both lie in (0,1).
double epsilon_explicit(std::size_t M, double beta, std::size_t dim);

// Smallest M with beta_apriori(M, eps, dim) <= beta.
std::size_t sample_size(double eps, double beta, std::size_t dim);

}  // namespace scencert
