// scencert: scenario-approach certification toolkit, batch front end.
//
// Subcommands:
//   epsilon           violation-level arithmetic (wait-and-judge / binomial
//                     tail / explicit sufficient bound)
//   certify-set       assemble a sampled feasible set, certify it, and
//                     validate the certificate by Monte Carlo
//   certify-solution  solve the uncertain-cost charging program per fleet
//                     size and measure cost-deterioration frequencies
//   sample-size       sample counts needed at a target level, dimension
//                     bound versus naive dimension scaling
//
// Exit codes: 0 success, 2 usage/config error, 3 numerical failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "scencert/certificates.hpp"
#include "scencert/errors.hpp"
#include "scencert/evstudy.hpp"
#include "scencert/io.hpp"
#include "scencert/scenario.hpp"

namespace {

using namespace scencert;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

std::vector<std::size_t> parse_count_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos
                                                 ? std::string::npos
                                                 : comma - pos);
    if (!tok.empty()) out.push_back(std::stoull(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw DomainError("expected a comma-separated list of counts");
  return out;
}

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

// Generic sampled-halfspace stream for configs that are not one of the
// packaged studies: fixed normals, noisy offsets.
class RawSampler : public ConstraintSampler {
 public:
  struct Row {
    Vec normal;
    double nominal = 0.0;
    bool gaussian = true;
    double sigma = 0.0, truncation = 3.0;  // gaussian parameters
    double lo = 0.0, hi = 0.0;             // uniform parameters
  };

  RawSampler(std::size_t dim, std::vector<Row> rows)
      : dim_(dim), rows_(std::move(rows)) {}

  static RawSampler from_json(const nlohmann::json& j) {
    std::vector<Row> rows;
    for (const auto& h : j.at("halfspaces")) {
      Row r;
      r.normal = h.at("a").get<Vec>();
      r.nominal = h.value("offset_nominal", 0.0);
      r.gaussian = h.value("dist", std::string("gaussian")) == "gaussian";
      r.sigma = h.value("sigma", 0.0);
      r.truncation = h.value("truncation", 3.0);
      r.lo = h.value("lo", 0.0);
      r.hi = h.value("hi", 0.0);
      rows.push_back(std::move(r));
    }
    return RawSampler(j.at("d").get<std::size_t>(), std::move(rows));
  }

  std::size_t dimension() const override { return dim_; }
  std::vector<SampledHalfspace> sample(std::uint64_t seed, std::string_view space,
                                       std::size_t index) const override {
    SeededStream draw = SeededStream(seed, space).derive("sample", index);
    std::vector<SampledHalfspace> out;
    out.reserve(rows_.size());
    for (const Row& r : rows_) {
      double offset = r.nominal;
      if (r.gaussian) {
        if (r.sigma > 0.0)
          offset += draw.truncated_gaussian(0.0, r.sigma, r.truncation);
      } else {
        offset += draw.uniform(r.lo, r.hi);
      }
      out.push_back({r.normal, offset, index});
    }
    return out;
  }

 private:
  std::size_t dim_;
  std::vector<Row> rows_;
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

int cmd_epsilon(const std::string& mode, std::size_t m, double beta,
                std::optional<std::size_t> k, std::optional<std::size_t> dim) {
  Certificate cert;
  cert.samples = m;
  cert.beta = beta;
  if (mode == "posteriori") {
    if (!k) throw DomainError("epsilon --mode posteriori requires --k");
    cert.kind = CertificateKind::APosterioriSet;
    cert.support = *k;
    cert.epsilon = epsilon_posteriori(m, *k, beta);
  } else if (mode == "apriori") {
    if (!dim) throw DomainError("epsilon --mode apriori requires --dim");
    cert.kind = CertificateKind::APrioriPoint;
    cert.support = *dim;
    cert.epsilon = epsilon_apriori(m, beta, *dim);
  } else if (mode == "explicit") {
    if (!dim) throw DomainError("epsilon --mode explicit requires --dim");
    cert.kind = CertificateKind::APrioriPoint;
    cert.support = *dim;
    cert.epsilon = epsilon_explicit(m, beta, *dim);
  } else {
    throw DomainError("epsilon: unknown mode '" + mode + "'");
  }
  std::cout << cert.to_json().dump(2) << "\n";
  return kExitOk;
}

int cmd_certify_set(const std::string& config_path, const std::string& m_text,
                    std::size_t m_test, double beta, std::uint64_t seed,
                    std::optional<std::size_t> k_override, const fs::path& out) {
  const Timer timer;
  const nlohmann::json cfg_json = load_config(config_path);
  const std::vector<std::size_t> m_list = parse_count_list(m_text);

  std::unique_ptr<ConstraintSampler> sampler;
  Polytope base(0);
  std::optional<std::size_t> structural_k;
  const std::string type = cfg_json.value("type", std::string("ev_feasibility"));
  if (type == "ev_feasibility") {
    auto cfg = ev::FeasibilityConfig::from_json(cfg_json);
    cfg.seed = seed;
    base = ev::feasibility_base(cfg);
    structural_k = cfg.agents * (2 * cfg.slots + 1);
    sampler = std::make_unique<ev::FeasibilitySampler>(cfg);
  } else if (type == "halfspace_stream") {
    auto raw = RawSampler::from_json(cfg_json);
    base = Polytope::from_json(cfg_json.at("base"));
    sampler = std::make_unique<RawSampler>(std::move(raw));
  } else {
    throw DomainError("certify-set: unknown config type '" + type + "'");
  }
  if (k_override) structural_k = k_override;

  fs::create_directories(out);
  RunManifest manifest;
  manifest.command = "certify-set";
  manifest.config_path = config_path;
  manifest.seed = seed;

  CsvTable results;
  results.header = {"M", "k_used", "epsilon_theory", "epsilon_empirical", "seed"};
  for (const std::size_t m : m_list) {
    const ScenarioFeasibleSet sfs = assemble(base, *sampler, m, seed);
    const Certificate cert = certify_set(sfs, beta, structural_k);
    std::vector<ViolationBlock> blocks;
    const ViolationEstimate est =
        estimate_set_violation(sfs, *sampler, m_test, seed, &blocks);
    results.rows.push_back({std::to_string(m), std::to_string(cert.support),
                            format_double(cert.epsilon),
                            format_double(est.frequency), std::to_string(seed)});

    const std::string cert_name = "certificate_M" + std::to_string(m) + ".json";
    nlohmann::json cj = cert.to_json();
    cj["seed"] = seed;
    cj["seed_namespace"] = std::string(kTrainSpace);
    write_json(out / cert_name, cj);
    manifest.outputs.push_back(cert_name);

    CsvTable blocks_csv;
    blocks_csv.header = {"trial_block", "hits", "trials", "frequency", "seed",
                         "namespace"};
    for (const ViolationBlock& b : blocks)
      blocks_csv.rows.push_back({std::to_string(b.block), std::to_string(b.hits),
                                 std::to_string(b.trials), format_double(b.frequency),
                                 std::to_string(seed), std::string(kTestSpace)});
    const std::string blocks_name = "violations_M" + std::to_string(m) + ".csv";
    write_csv(out / blocks_name, blocks_csv);
    manifest.outputs.push_back(blocks_name);
  }
  write_csv(out / "results.csv", results);
  manifest.outputs.push_back("results.csv");
  manifest.duration_seconds = timer.seconds();
  write_manifest(out, manifest);
  return kExitOk;
}

int cmd_certify_solution(const std::string& config_path, const std::string& n_text,
                         std::size_t m, std::size_t m_test, double beta,
                         std::size_t repeats, std::uint64_t seed,
                         const fs::path& out) {
  const Timer timer;
  const nlohmann::json cfg_json = load_config(config_path);
  auto cfg = ev::CostConfig::from_json(cfg_json);
  cfg.seed = seed;
  const std::vector<std::size_t> agent_list = parse_count_list(n_text);

  const auto rows = ev::run_cost_experiment(cfg, agent_list, m, m_test, beta, repeats);

  fs::create_directories(out);
  CsvTable csv;
  csv.header = {"N", "repeat", "empirical_violation", "epsilon_theory", "status",
                "seed"};
  bool any_limit = false;
  for (const auto& r : rows) {
    csv.rows.push_back({std::to_string(r.agents), std::to_string(r.repeat),
                        format_double(r.empirical), format_double(r.eps_theory),
                        r.status, std::to_string(seed)});
    any_limit = any_limit || r.status != "ok";
  }
  write_csv(out / "results.csv", csv);

  RunManifest manifest;
  manifest.command = "certify-solution";
  manifest.config_path = config_path;
  manifest.seed = seed;
  manifest.outputs = {"results.csv"};
  manifest.duration_seconds = timer.seconds();
  write_manifest(out, manifest);
  return any_limit ? kExitNumeric : kExitOk;
}

int cmd_sample_size(double eps, double beta, std::size_t n,
                    const std::string& n_text, const fs::path& out) {
  const Timer timer;
  if (!(eps > 0.0 && eps < 1.0))
    throw DomainError("sample-size: eps must lie strictly inside (0,1)");
  if (!(beta > 0.0 && beta < 1.0))
    throw DomainError("sample-size: beta must lie strictly inside (0,1)");
  const std::vector<std::size_t> agent_list = parse_count_list(n_text);

  fs::create_directories(out);
  CsvTable csv;
  csv.header = {"N", "M_rank_bound", "M_naive"};
  const std::size_t fixed = sample_size(eps, beta, n);
  for (const std::size_t agents : agent_list)
    csv.rows.push_back({std::to_string(agents), std::to_string(fixed),
                        std::to_string(sample_size(eps, beta, n * agents))});
  write_csv(out / "sample_sizes.csv", csv);

  RunManifest manifest;
  manifest.command = "sample-size";
  manifest.seed = 0;
  manifest.outputs = {"sample_sizes.csv"};
  manifest.duration_seconds = timer.seconds();
  write_manifest(out, manifest);

  for (const auto& row : csv.rows)
    std::cout << row[0] << "," << row[1] << "," << row[2] << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scenario-approach feasibility certification toolkit"};
  app.require_subcommand(1);

  // epsilon
  auto* eps_cmd = app.add_subcommand("epsilon", "violation-level arithmetic");
  std::string mode;
  std::size_t eps_m = 0;
  double eps_beta = 0.0;
  std::optional<std::size_t> eps_k, eps_dim;
  eps_cmd->add_option("--mode", mode, "posteriori | apriori | explicit")->required();
  eps_cmd->add_option("--M", eps_m, "sample count")->required();
  eps_cmd->add_option("--beta", eps_beta, "confidence parameter")->required();
  eps_cmd->add_option("--k", eps_k, "support cardinality (posteriori)");
  eps_cmd->add_option("--dim", eps_dim, "dimension bound (apriori/explicit)");

  // certify-set
  auto* set_cmd = app.add_subcommand("certify-set", "certify a sampled feasible set");
  std::string set_config, set_m = "1000";
  std::size_t set_mtest = 10000;
  double set_beta = 1e-6;
  std::uint64_t set_seed = 1;
  std::optional<std::size_t> set_k_override;
  std::string set_out = "out";
  set_cmd->add_option("--config", set_config, "config JSON path")->required();
  set_cmd->add_option("--M", set_m, "sample count, or comma list for a sweep");
  set_cmd->add_option("--M-test", set_mtest, "Monte Carlo test samples");
  set_cmd->add_option("--beta", set_beta, "confidence parameter");
  set_cmd->add_option("--seed", set_seed, "seed");
  set_cmd->add_option("--k-override", set_k_override, "support bound override");
  set_cmd->add_option("--out", set_out, "output directory");

  // certify-solution
  auto* sol_cmd =
      app.add_subcommand("certify-solution", "certify uncertain-cost optimizers");
  std::string sol_config, sol_nlist = "10";
  std::size_t sol_m = 500, sol_mtest = 100000, sol_repeats = 20;
  double sol_beta = 1e-6;
  std::uint64_t sol_seed = 1;
  std::string sol_out = "out";
  sol_cmd->add_option("--config", sol_config, "config JSON path")->required();
  sol_cmd->add_option("--N-list", sol_nlist, "comma list of fleet sizes");
  sol_cmd->add_option("--M", sol_m, "training samples per cell");
  sol_cmd->add_option("--M-test", sol_mtest, "Monte Carlo test samples");
  sol_cmd->add_option("--beta", sol_beta, "confidence parameter");
  sol_cmd->add_option("--repeats", sol_repeats, "repetitions per fleet size");
  sol_cmd->add_option("--seed", sol_seed, "seed");
  sol_cmd->add_option("--out", sol_out, "output directory");

  // sample-size
  auto* size_cmd = app.add_subcommand("sample-size", "required sample counts");
  double size_eps = 0.0, size_beta = 0.0;
  std::size_t size_n = 0;
  std::string size_nlist = "10,20,30,40,50";
  std::string size_out = "out";
  size_cmd->add_option("--eps", size_eps, "target violation level")->required();
  size_cmd->add_option("--beta", size_beta, "confidence parameter")->required();
  size_cmd->add_option("--n", size_n, "per-agent decision length")->required();
  size_cmd->add_option("--N-list", size_nlist, "comma list of fleet sizes");
  size_cmd->add_option("--out", size_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*eps_cmd) return cmd_epsilon(mode, eps_m, eps_beta, eps_k, eps_dim);
    if (*set_cmd)
      return cmd_certify_set(set_config, set_m, set_mtest, set_beta, set_seed,
                             set_k_override, set_out);
    if (*sol_cmd)
      return cmd_certify_solution(sol_config, sol_nlist, sol_m, sol_mtest, sol_beta,
                                  sol_repeats, sol_seed, sol_out);
    if (*size_cmd)
      return cmd_sample_size(size_eps, size_beta, size_n, size_nlist, size_out);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InfeasibleSampleConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
