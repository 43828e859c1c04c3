#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scencert/aggregative.hpp"
#include "scencert/scenario.hpp"

#include "json.hpp"

namespace scencert::ev {

// Fleet charging feasibility study: per agent (vehicle) and time slot,
// sampled power-rate bounds and a sampled terminal-energy requirement.
// Rate bounds in kW, energies in kWh, noise as truncated gaussians.
struct FeasibilityConfig {
  std::size_t agents = 0;  // N
  std::size_t slots = 0;   // n
  std::uint64_t seed = 0;
  std::vector<Vec> rate_max_nominal;  // per agent, per slot (kW)
  double rate_min_nominal = 2.0;      // kW, shared
  Vec energy_nominal;                 // per agent (kWh)
  double sigma_bounds = 0.5;
  double sigma_energy = 1.0;
  double truncation = 3.0;  // in sigma units

  // nominal rate caps drawn uniformly from [10, 20] kW; nominal energy
  // set to half the maximum deliverable energy, which keeps every
  // truncated-noise realization feasible
  static FeasibilityConfig defaults(std::size_t agents, std::size_t slots,
                                    std::uint64_t seed);

  void validate() const;  // throws InfeasibleSampleConfig

  nlohmann::json to_json() const;
  static FeasibilityConfig from_json(const nlohmann::json& j);
};

// All constraints of one uncertainty realization: per agent, `slots`
// upper bounds, `slots` lower bounds and one energy halfspace; exactly
// agents * (2 * slots + 1) rows.
std::vector<SampledHalfspace> sample_feasibility_constraints(
    const FeasibilityConfig& cfg, std::uint64_t seed, std::string_view space,
    std::size_t index);

class FeasibilitySampler : public ConstraintSampler {
 public:
  explicit FeasibilitySampler(FeasibilityConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
  }
  const FeasibilityConfig& config() const { return cfg_; }
  std::size_t dimension() const override { return cfg_.agents * cfg_.slots; }
  std::vector<SampledHalfspace> sample(std::uint64_t seed, std::string_view space,
                                       std::size_t index) const override {
    return sample_feasibility_constraints(cfg_, seed, space, index);
  }

 private:
  FeasibilityConfig cfg_;
};

// Deterministic compact base box covering every truncated realization.
Polytope feasibility_base(const FeasibilityConfig& cfg);

struct FeasibilityRow {
  std::size_t samples = 0;  // M
  std::size_t k_used = 0;
  double eps_theory = 0.0;
  double eps_empirical = 0.0;
};

// One certified run per M: assemble, certify with the structural facet
// bound k = N(2n+1), then measure the violation frequency on a fresh
// test stream.
std::vector<FeasibilityRow> run_feasibility_experiment(
    const FeasibilityConfig& cfg, const std::vector<std::size_t>& m_list,
    std::size_t m_test, double beta);

struct EpsilonRow {
  std::size_t agents = 0;
  double epsilon = 0.0;
};

// Violation level at the structural support bound k = N(2n+1) as the
// fleet grows; strictly increasing in N.
std::vector<EpsilonRow> agent_sweep_epsilon(std::size_t slots, std::size_t samples,
                                            double beta,
                                            const std::vector<std::size_t>& agent_list);

// Charging-cost study: uncertain electricity price acting on the
// aggregate consumption, deterministic per-agent constraints.
struct CostConfig {
  std::size_t agents = 0;  // N
  std::size_t slots = 0;   // n
  std::uint64_t seed = 0;
  Vec rate_max;        // per agent (kW), constant across slots
  double rate_min = 2.0;  // kW
  Vec energy;          // per agent (kWh)
  double a0_diag = 0.01;  // nominal price slope
  Vec b0;              // base price profile, length = slots
  double a_diag_lo = 0.0, a_diag_hi = 0.02;   // sampled slope range
  double b_scale_lo = 0.8, b_scale_hi = 1.2;  // sampled intercept scaling

  // per-agent caps drawn uniformly from [6, 15] kW; energies set to half
  // the deliverable maximum; the base price profile is a synthetic
  // evening-peak shape resampled to `slots` points
  static CostConfig defaults(std::size_t agents, std::size_t slots,
                             std::uint64_t seed);

  void validate() const;

  nlohmann::json to_json() const;
  static CostConfig from_json(const nlohmann::json& j);
};

// Synthetic 12-point evening-peak base price profile, linearly resampled.
Vec base_price_profile(std::size_t slots);

AggregativeProgram build_cost_program(const CostConfig& cfg, std::size_t samples);

// One fresh cost sample drawn from the config's distributions.
CostSample draw_cost_sample(const CostConfig& cfg, SeededStream& stream);

struct CostRow {
  std::size_t agents = 0;
  std::size_t repeat = 0;
  double empirical = 0.0;
  double eps_theory = 0.0;
  std::string status = "ok";  // "iteration_limit" marks a partial row
};

// Per (N, repeat): fresh bounds and cost-sample stream, centralized
// epigraph solve, then the cost-deterioration frequency over a fresh test
// stream. The theory line epsilon_explicit(M, beta, n) is constant in N.
std::vector<CostRow> run_cost_experiment(const CostConfig& cfg,
                                         const std::vector<std::size_t>& agent_list,
                                         std::size_t samples, std::size_t m_test,
                                         double beta, std::size_t repeats);

}  // namespace scencert::ev
