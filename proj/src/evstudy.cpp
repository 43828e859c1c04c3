#include "scencert/evstudy.hpp"

#include <algorithm>
#include <cmath>

#include "scencert/errors.hpp"
#include "scencert/numeric.hpp"
#include "scencert/parallel.hpp"

namespace scencert::ev {

namespace {

constexpr const char* kNominalSpace = "nominal";

double worst_case_margin(const FeasibilityConfig& c) {
  // smallest gap between sampled lower and upper rate bounds
  double lo_worst = c.rate_min_nominal + c.truncation * c.sigma_bounds;
  double hi_worst = std::numeric_limits<double>::infinity();
  for (const Vec& row : c.rate_max_nominal)
    for (double v : row)
      hi_worst = std::min(hi_worst, v - c.truncation * c.sigma_bounds);
  return hi_worst - lo_worst;
}

}  // namespace

FeasibilityConfig FeasibilityConfig::defaults(std::size_t agents, std::size_t slots,
                                              std::uint64_t seed) {
  FeasibilityConfig c;
  c.agents = agents;
  c.slots = slots;
  c.seed = seed;
  SeededStream nominal(seed, kNominalSpace);
  c.rate_max_nominal.resize(agents);
  c.energy_nominal.resize(agents);
  for (std::size_t i = 0; i < agents; ++i) {
    c.rate_max_nominal[i].resize(slots);
    double cap = 0.0;
    for (std::size_t t = 0; t < slots; ++t) {
      c.rate_max_nominal[i][t] = nominal.uniform(10.0, 20.0);
      cap += c.rate_max_nominal[i][t];
    }
    c.energy_nominal[i] = 0.5 * cap;
  }
  return c;
}

void FeasibilityConfig::validate() const {
  if (agents == 0 || slots == 0)
    throw InfeasibleSampleConfig("feasibility config: empty fleet or horizon");
  if (rate_max_nominal.size() != agents || energy_nominal.size() != agents)
    throw InfeasibleSampleConfig("feasibility config: per-agent fields mismatch");
  for (const Vec& row : rate_max_nominal)
    if (row.size() != slots)
      throw InfeasibleSampleConfig("feasibility config: per-slot fields mismatch");
  if (!(truncation > 0.0))
    throw InfeasibleSampleConfig("feasibility config: truncation must be positive");
  if (worst_case_margin(*this) <= 0.0)
    throw InfeasibleSampleConfig(
        "feasibility config: truncated noise admits an empty rate interval");
  for (std::size_t i = 0; i < agents; ++i) {
    double deliverable = 0.0;
    for (double v : rate_max_nominal[i])
      deliverable += v - truncation * sigma_bounds;
    if (energy_nominal[i] + truncation * sigma_energy > deliverable)
      throw InfeasibleSampleConfig(
          "feasibility config: worst-case energy demand exceeds deliverable energy");
  }
}

nlohmann::json FeasibilityConfig::to_json() const {
  return nlohmann::json{{"type", "ev_feasibility"},
                        {"N", agents},
                        {"n", slots},
                        {"seed", seed},
                        {"rate_max_nominal", rate_max_nominal},
                        {"rate_min_nominal", rate_min_nominal},
                        {"energy_nominal", energy_nominal},
                        {"sigma_bounds", sigma_bounds},
                        {"sigma_energy", sigma_energy},
                        {"truncation", truncation}};
}

FeasibilityConfig FeasibilityConfig::from_json(const nlohmann::json& j) {
  FeasibilityConfig c = defaults(j.at("N").get<std::size_t>(),
                                 j.at("n").get<std::size_t>(),
                                 j.value("seed", std::uint64_t{1}));
  if (j.contains("rate_max_nominal"))
    c.rate_max_nominal = j.at("rate_max_nominal").get<std::vector<Vec>>();
  if (j.contains("energy_nominal"))
    c.energy_nominal = j.at("energy_nominal").get<Vec>();
  c.rate_min_nominal = j.value("rate_min_nominal", c.rate_min_nominal);
  c.sigma_bounds = j.value("sigma_bounds", c.sigma_bounds);
  c.sigma_energy = j.value("sigma_energy", c.sigma_energy);
  c.truncation = j.value("truncation", c.truncation);
  c.validate();
  return c;
}

std::vector<SampledHalfspace> sample_feasibility_constraints(
    const FeasibilityConfig& cfg, std::uint64_t seed, std::string_view space,
    std::size_t index) {
  const std::size_t dim = cfg.agents * cfg.slots;
  SeededStream draw = SeededStream(seed, space).derive("sample", index);
  std::vector<SampledHalfspace> out;
  out.reserve(cfg.agents * (2 * cfg.slots + 1));
  for (std::size_t i = 0; i < cfg.agents; ++i) {
    for (std::size_t t = 0; t < cfg.slots; ++t) {
      const double hi = cfg.rate_max_nominal[i][t] +
                        draw.truncated_gaussian(0.0, cfg.sigma_bounds, cfg.truncation);
      Vec e(dim, 0.0);
      e[i * cfg.slots + t] = 1.0;
      out.push_back({std::move(e), hi, index});
    }
    for (std::size_t t = 0; t < cfg.slots; ++t) {
      const double lo = cfg.rate_min_nominal +
                        draw.truncated_gaussian(0.0, cfg.sigma_bounds, cfg.truncation);
      Vec e(dim, 0.0);
      e[i * cfg.slots + t] = -1.0;
      out.push_back({std::move(e), -lo, index});
    }
    const double energy = cfg.energy_nominal[i] +
                          draw.truncated_gaussian(0.0, cfg.sigma_energy, cfg.truncation);
    Vec sum(dim, 0.0);
    for (std::size_t t = 0; t < cfg.slots; ++t) sum[i * cfg.slots + t] = -1.0;
    out.push_back({std::move(sum), -energy, index});
  }
  return out;
}

Polytope feasibility_base(const FeasibilityConfig& cfg) {
  const std::size_t dim = cfg.agents * cfg.slots;
  Vec lo(dim), hi(dim);
  for (std::size_t i = 0; i < cfg.agents; ++i)
    for (std::size_t t = 0; t < cfg.slots; ++t) {
      lo[i * cfg.slots + t] =
          cfg.rate_min_nominal - cfg.truncation * cfg.sigma_bounds;
      hi[i * cfg.slots + t] =
          cfg.rate_max_nominal[i][t] + cfg.truncation * cfg.sigma_bounds;
    }
  return Polytope::box(lo, hi);
}

std::vector<FeasibilityRow> run_feasibility_experiment(
    const FeasibilityConfig& cfg, const std::vector<std::size_t>& m_list,
    std::size_t m_test, double beta) {
  cfg.validate();
  const FeasibilitySampler sampler(cfg);
  const Polytope base = feasibility_base(cfg);
  const std::size_t k_bound = cfg.agents * (2 * cfg.slots + 1);

  std::vector<FeasibilityRow> rows;
  for (const std::size_t m : m_list) {
    const ScenarioFeasibleSet sfs = assemble(base, sampler, m, cfg.seed);
    const Certificate cert = certify_set(sfs, beta, k_bound);
    const ViolationEstimate est =
        estimate_set_violation(sfs, sampler, m_test, cfg.seed);
    rows.push_back({m, cert.support, cert.epsilon, est.frequency});
  }
  return rows;
}

std::vector<EpsilonRow> agent_sweep_epsilon(
    std::size_t slots, std::size_t samples, double beta,
    const std::vector<std::size_t>& agent_list) {
  std::vector<EpsilonRow> rows;
  for (const std::size_t agents : agent_list) {
    const std::size_t k = agents * (2 * slots + 1);
    if (k >= samples)
      throw DomainError("agent_sweep_epsilon: facet bound reaches the sample count");
    rows.push_back({agents, epsilon_posteriori(samples, k, beta)});
  }
  return rows;
}

Vec base_price_profile(std::size_t slots) {
  // synthetic evening-peak shape (12 anchor points, unit scale)
  static const double anchors[12] = {0.55, 0.50, 0.48, 0.52, 0.60, 0.72,
                                     0.88, 1.00, 1.08, 1.02, 0.86, 0.68};
  Vec out(slots);
  if (slots == 1) {
    out[0] = anchors[5];
    return out;
  }
  for (std::size_t t = 0; t < slots; ++t) {
    const double u = double(t) * 11.0 / double(slots - 1);
    const std::size_t k = std::min<std::size_t>(10, std::size_t(u));
    const double w = u - double(k);
    out[t] = (1.0 - w) * anchors[k] + w * anchors[k + 1];
  }
  return out;
}

CostConfig CostConfig::defaults(std::size_t agents, std::size_t slots,
                                std::uint64_t seed) {
  CostConfig c;
  c.agents = agents;
  c.slots = slots;
  c.seed = seed;
  SeededStream nominal(seed, kNominalSpace);
  c.rate_max.resize(agents);
  c.energy.resize(agents);
  for (std::size_t i = 0; i < agents; ++i) {
    c.rate_max[i] = nominal.uniform(6.0, 15.0);
    c.energy[i] = 0.5 * double(slots) * c.rate_max[i];
  }
  c.b0 = base_price_profile(slots);
  return c;
}

void CostConfig::validate() const {
  if (agents == 0 || slots == 0)
    throw InfeasibleSampleConfig("cost config: empty fleet or horizon");
  if (rate_max.size() != agents || energy.size() != agents)
    throw InfeasibleSampleConfig("cost config: per-agent fields mismatch");
  if (b0.size() != slots)
    throw InfeasibleSampleConfig("cost config: price profile length mismatch");
  if (a0_diag < 0.0 || a_diag_lo < 0.0 || a_diag_hi < a_diag_lo)
    throw InfeasibleSampleConfig("cost config: price slopes must be non-negative");
  for (std::size_t i = 0; i < agents; ++i) {
    if (!(rate_min < rate_max[i]))
      throw InfeasibleSampleConfig("cost config: rate interval is empty");
    if (energy[i] > double(slots) * rate_max[i])
      throw InfeasibleSampleConfig("cost config: energy demand undeliverable");
  }
}

nlohmann::json CostConfig::to_json() const {
  return nlohmann::json{{"type", "ev_cost"},
                        {"N", agents},
                        {"n", slots},
                        {"seed", seed},
                        {"rate_max", rate_max},
                        {"rate_min", rate_min},
                        {"energy", energy},
                        {"a0_diag", a0_diag},
                        {"b0", b0},
                        {"a_diag_lo", a_diag_lo},
                        {"a_diag_hi", a_diag_hi},
                        {"b_scale_lo", b_scale_lo},
                        {"b_scale_hi", b_scale_hi}};
}

CostConfig CostConfig::from_json(const nlohmann::json& j) {
  CostConfig c = defaults(j.at("N").get<std::size_t>(),
                          j.at("n").get<std::size_t>(),
                          j.value("seed", std::uint64_t{1}));
  if (j.contains("rate_max")) c.rate_max = j.at("rate_max").get<Vec>();
  if (j.contains("energy")) c.energy = j.at("energy").get<Vec>();
  if (j.contains("b0")) c.b0 = j.at("b0").get<Vec>();
  c.rate_min = j.value("rate_min", c.rate_min);
  c.a0_diag = j.value("a0_diag", c.a0_diag);
  c.a_diag_lo = j.value("a_diag_lo", c.a_diag_lo);
  c.a_diag_hi = j.value("a_diag_hi", c.a_diag_hi);
  c.b_scale_lo = j.value("b_scale_lo", c.b_scale_lo);
  c.b_scale_hi = j.value("b_scale_hi", c.b_scale_hi);
  c.validate();
  return c;
}

CostSample draw_cost_sample(const CostConfig& cfg, SeededStream& stream) {
  CostSample s;
  Vec diag(cfg.slots);
  for (auto& v : diag) v = stream.uniform(cfg.a_diag_lo, cfg.a_diag_hi);
  s.A = Matrix::diagonal(diag);
  s.b.resize(cfg.slots);
  for (std::size_t t = 0; t < cfg.slots; ++t)
    s.b[t] = cfg.b0[t] * stream.uniform(cfg.b_scale_lo, cfg.b_scale_hi);
  return s;
}

AggregativeProgram build_cost_program(const CostConfig& cfg, std::size_t samples) {
  cfg.validate();
  const std::size_t dim = cfg.agents * cfg.slots;

  AggregativeProgram prog;
  prog.agents = cfg.agents;
  prog.dim = cfg.slots;
  prog.A0 = Matrix::diagonal(Vec(cfg.slots, cfg.a0_diag));
  prog.b0 = cfg.b0;

  Polytope domain(dim);
  for (std::size_t i = 0; i < cfg.agents; ++i) {
    for (std::size_t t = 0; t < cfg.slots; ++t) {
      Vec e(dim, 0.0);
      e[i * cfg.slots + t] = 1.0;
      domain.add(e, cfg.rate_max[i]);
      e[i * cfg.slots + t] = -1.0;
      domain.add(e, -cfg.rate_min);
    }
    Vec sum(dim, 0.0);
    for (std::size_t t = 0; t < cfg.slots; ++t) sum[i * cfg.slots + t] = -1.0;
    domain.add(sum, -cfg.energy[i]);
  }
  prog.domain = std::move(domain);

  SeededStream train = SeededStream(cfg.seed, kTrainSpace);
  for (std::size_t m = 1; m <= samples; ++m) {
    SeededStream draw = train.derive("sample", m);
    prog.samples.push_back(draw_cost_sample(cfg, draw));
  }
  prog.validate();
  return prog;
}

std::vector<CostRow> run_cost_experiment(const CostConfig& cfg,
                                         const std::vector<std::size_t>& agent_list,
                                         std::size_t samples, std::size_t m_test,
                                         double beta, std::size_t repeats) {
  const double eps_theory = epsilon_explicit(samples, beta, cfg.slots);
  const std::size_t cells = agent_list.size() * repeats;
  std::vector<CostRow> rows(cells);

  parallel_for(cells, [&](std::size_t cell) {
    const std::size_t agents = agent_list[cell / repeats];
    const std::size_t repeat = cell % repeats;
    SeededStream cell_stream =
        SeededStream(cfg.seed, "cost-cells").derive("N", agents).derive("rep", repeat);
    CostConfig local = CostConfig::defaults(agents, cfg.slots, cell_stream.next_u64());
    local.a0_diag = cfg.a0_diag;
    local.rate_min = cfg.rate_min;
    local.a_diag_lo = cfg.a_diag_lo;
    local.a_diag_hi = cfg.a_diag_hi;
    local.b_scale_lo = cfg.b_scale_lo;
    local.b_scale_hi = cfg.b_scale_hi;
    local.b0 = cfg.b0;

    CostRow row;
    row.agents = agents;
    row.repeat = repeat;
    row.eps_theory = eps_theory;
    try {
      const AggregativeProgram prog = build_cost_program(local, samples);
      const EpigraphSolution sol = solve_epigraph(prog, 1e-7);
      SeededStream test = SeededStream(local.seed, kTestSpace);
      std::size_t hits = 0;
      for (std::size_t t = 1; t <= m_test; ++t) {
        SeededStream draw = test.derive("sample", t);
        const CostSample s = draw_cost_sample(local, draw);
        hits += cost_deterioration_event(prog, sol, s) ? 1 : 0;
      }
      row.empirical = m_test ? double(hits) / double(m_test) : 0.0;
    } catch (const IterationLimit&) {
      row.status = "iteration_limit";
    }
    rows[cell] = std::move(row);
  });
  return rows;
}

}  // namespace scencert::ev
