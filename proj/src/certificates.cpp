#include "scencert/certificates.hpp"

#include <cmath>
#include <limits>

#include "scencert/errors.hpp"

namespace scencert {

namespace {

const char* kind_name(CertificateKind k) {
  return k == CertificateKind::APosterioriSet ? "APosterioriSet" : "APrioriPoint";
}

// log-sum-exp with Neumaier compensation on the shifted terms
double log_sum_exp(const std::vector<double>& logs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : logs) mx = std::max(mx, v);
  if (!std::isfinite(mx)) return mx;
  double sum = 0.0, comp = 0.0;
  for (double v : logs) {
    const double term = std::exp(v - mx);
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return mx + std::log(sum + comp);
}

}  // namespace

nlohmann::json Certificate::to_json() const {
  return nlohmann::json{{"kind", kind_name(kind)},
                        {"M", samples},
                        {"k", support},
                        {"epsilon", epsilon},
                        {"beta", beta}};
}

Certificate Certificate::from_json(const nlohmann::json& j) {
  Certificate c;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "APosterioriSet")
    c.kind = CertificateKind::APosterioriSet;
  else if (kind == "APrioriPoint")
    c.kind = CertificateKind::APrioriPoint;
  else
    throw DomainError("Certificate: unknown kind '" + kind + "'");
  c.samples = j.at("M").get<std::size_t>();
  c.support = j.at("k").get<std::size_t>();
  c.epsilon = j.at("epsilon").get<double>();
  c.beta = j.at("beta").get<double>();
  return c;
}

double log_binomial(std::size_t n, std::size_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
         std::lgamma(double(n - k) + 1.0);
}

double log1m_epsilon_posteriori(std::size_t M, std::size_t k, double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw DomainError("epsilon_posteriori: beta must lie in (0,1)");
  if (k > M) throw DomainError("epsilon_posteriori: k exceeds M");
  if (k == M) return -std::numeric_limits<double>::infinity();
  // (1 - eps)^(M-k) = beta / (M C(M,k))
  const double log_root =
      (std::log(beta) - std::log(double(M)) - log_binomial(M, k)) /
      double(M - k);
  return std::min(0.0, log_root);
}

double epsilon_posteriori(std::size_t M, std::size_t k, double beta) {
  const double eps = -std::expm1(log1m_epsilon_posteriori(M, k, beta));
  return std::min(1.0, std::max(0.0, eps));
}

double beta_apriori(std::size_t M, double eps, std::size_t dim) {
  if (!(eps > 0.0 && eps < 1.0))
    throw DomainError("beta_apriori: eps must lie in (0,1)");
  if (dim >= M) throw DomainError("beta_apriori: dim must be below M");
  const double le = std::log(eps);
  const double l1e = std::log1p(-eps);
  std::vector<double> logs(dim + 1);
  for (std::size_t j = 0; j <= dim; ++j)
    logs[j] = log_binomial(M, j) + double(j) * le + double(M - j) * l1e;
  const double v = std::exp(log_sum_exp(logs));
  return std::min(1.0, v);
}

double epsilon_apriori(std::size_t M, double beta, std::size_t dim) {
  if (!(beta > 0.0 && beta < 1.0))
    throw DomainError("epsilon_apriori: beta must lie in (0,1)");
  if (dim >= M) throw DomainError("epsilon_apriori: dim must be below M");
  double lo = 1e-15, hi = 1.0 - 1e-15;
  if (beta_apriori(M, lo, dim) < beta || beta_apriori(M, hi, dim) > beta)
    throw NoSolution("epsilon_apriori: tail never reaches beta on (0,1)");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (beta_apriori(M, mid, dim) > beta)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-12) break;
  }
  return 0.5 * (lo + hi);
}

double epsilon_explicit(std::size_t M, double beta, std::size_t dim) {
  if (M == 0) throw DomainError("epsilon_explicit: M must be positive");
  if (!(beta > 0.0)) throw DomainError("epsilon_explicit: beta must be positive");
  return (2.0 / double(M)) * (std::log(1.0 / beta) + double(dim) * std::log(2.0));
}

std::size_t sample_size(double eps, double beta, std::size_t dim) {
  if (!(eps > 0.0 && eps < 1.0))
    throw DomainError("sample_size: eps must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0))
    throw DomainError("sample_size: beta must lie in (0,1)");
  std::size_t hi = dim + 1;
  while (beta_apriori(hi, eps, dim) > beta) {
    hi *= 2;
    if (hi > (std::size_t(1) << 40))
      throw NoSolution("sample_size: growth limit reached");
  }
  std::size_t lo = dim + 1;  // invariant: tail(lo-?) ... search smallest M with tail <= beta
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (beta_apriori(mid, eps, dim) <= beta)
      hi = mid;
    else
      lo = mid + 1;
  }
  return hi;
}

}  // namespace scencert
