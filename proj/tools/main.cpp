/*
 * Copyright 2026 The mvmc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mvmc/benchmarks.hpp"
#include "mvmc/pretraining.hpp"
#include "mvmc/training.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNanAbort = 2;
constexpr int kExitConfigError = 3;

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ResolvedConfig {
  nlohmann::json system;
  mvmc::TrainingOptions training;
  nlohmann::json resolved;  // full config with defaults filled in
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ResolvedConfig parse_run_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& err) {
    throw ConfigError(std::string("config is not valid JSON: ") + err.what());
  }
  ResolvedConfig cfg;
  if (!j.contains("system")) throw ConfigError("missing field: system");
  cfg.system = j["system"];
  const std::string type = cfg.system.value("type", "");
  if (type != "1d-harmonic" && type != "1d-polynomial" && type != "toy-molecular")
    throw ConfigError("system.type must be 1d-harmonic, 1d-polynomial or toy-molecular");
  const int n_states = cfg.system.value("n_states", 0);
  if (n_states < 1) throw ConfigError("system.n_states must be >= 1");

  const nlohmann::json sampler = j.value("sampler", nlohmann::json::object());
  const nlohmann::json training = j.value("training", nlohmann::json::object());
  const nlohmann::json snap = training.value("snap", nlohmann::json::object());
  const nlohmann::json estimators = j.value("estimators", nlohmann::json::object());

  mvmc::TrainingOptions& opt = cfg.training;
  opt.n_walkers_total = sampler.value("n_walkers_total", 512);
  opt.decorr_steps = sampler.value("decorr_steps", 20);
  opt.target_acceptance = sampler.value("target_acceptance", 0.525);
  opt.steps = training.value("steps", 1000);
  opt.lr0 = training.value("lr0", 0.02);
  opt.t_decay = training.value("t_decay", 1e4);
  opt.beta_tilde = training.value("beta_tilde", 4.0);
  opt.grad_clip = training.value("grad_clip", 0.032);
  opt.trace_every = training.value("trace_every", 10);
  opt.checkpoint_every = training.value("checkpoint_every", 1000);
  opt.snap_enabled = snap.value("enabled", false);
  opt.snap_t_ramp = snap.value("t_ramp", 5000.0);
  opt.snap_width = snap.value("width", 500.0);
  opt.s2_values = snap.value("s2_values", std::vector<double>{});
  opt.bridge_iters = estimators.value("bridge_iters", 10);
  opt.bridge_clip = estimators.value("bridge_clip", 2.0);
  opt.msis_enabled = estimators.value("msis_enabled", true);
  opt.seed = j.value("seed", 0ULL);
  opt.output_dir = j.value("output_dir", std::string("out"));

  if (opt.n_walkers_total < 2 * n_states)
    throw ConfigError("sampler.n_walkers_total must be >= 2 * system.n_states");
  if (opt.steps < 1) throw ConfigError("training.steps must be >= 1");
  if (opt.lr0 <= 0.0) throw ConfigError("training.lr0 must be positive");
  if (opt.target_acceptance <= 0.0 || opt.target_acceptance >= 1.0)
    throw ConfigError("sampler.target_acceptance must be in (0, 1)");
  if (opt.bridge_clip <= 1.0) throw ConfigError("estimators.bridge_clip must exceed 1");

  cfg.resolved["system"] = cfg.system;
  cfg.resolved["sampler"] = {{"n_walkers_total", opt.n_walkers_total},
                             {"decorr_steps", opt.decorr_steps},
                             {"target_acceptance", opt.target_acceptance}};
  cfg.resolved["training"] = {{"steps", opt.steps},
                              {"lr0", opt.lr0},
                              {"t_decay", opt.t_decay},
                              {"beta_tilde", opt.beta_tilde},
                              {"grad_clip", opt.grad_clip},
                              {"trace_every", opt.trace_every},
                              {"checkpoint_every", opt.checkpoint_every},
                              {"snap",
                               {{"enabled", opt.snap_enabled},
                                {"t_ramp", opt.snap_t_ramp},
                                {"width", opt.snap_width},
                                {"s2_values", opt.s2_values}}}};
  cfg.resolved["estimators"] = {{"bridge_iters", opt.bridge_iters},
                                {"bridge_clip", opt.bridge_clip},
                                {"msis_enabled", opt.msis_enabled}};
  cfg.resolved["seed"] = opt.seed;
  cfg.resolved["output_dir"] = opt.output_dir;
  return cfg;
}

struct BuiltSystem {
  std::unique_ptr<mvmc::WaveFunctionModel> model;
  std::unique_ptr<mvmc::Hamiltonian> hamiltonian;
};

BuiltSystem build_system(const nlohmann::json& system) {
  BuiltSystem out;
  const std::string type = system.value("type", "");
  const int n_states = system.value("n_states", 1);
  if (type == "1d-harmonic" || type == "1d-polynomial") {
    const int max_degree = system.value("max_degree", n_states + 1);
    out.model = std::make_unique<mvmc::HermiteGaussianModel>(n_states, max_degree);
    if (type == "1d-harmonic") {
      out.hamiltonian = std::make_unique<mvmc::Harmonic1D>(system.value("omega", 1.0));
    } else {
      out.hamiltonian = std::make_unique<mvmc::Polynomial1D>(
          system.value("coeffs", std::vector<double>{0.0, 0.0, 0.5}));
    }
  } else {
    std::vector<std::array<double, 3>> nuclei;
    for (const auto& n : system.at("nuclei"))
      nuclei.push_back({n.at(0).get<double>(), n.at(1).get<double>(), n.at(2).get<double>()});
    const auto charges = system.at("charges").get<std::vector<double>>();
    const int n_up = system.at("n_up").get<int>();
    const int n_down = system.at("n_down").get<int>();
    const int n_orb = system.value("n_orb", n_up + n_down);
    const int n_det = system.value("n_det", 1);
    out.model = std::make_unique<mvmc::ExcitedPfaffianModel>(n_states, n_det, n_orb, nuclei,
                                                             n_up, n_down);
    out.hamiltonian = std::make_unique<mvmc::Molecular>(nuclei, charges);
  }
  return out;
}

int cmd_run(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
            const std::string& output_override, int threads, bool dry_run) {
  ResolvedConfig cfg;
  try {
    cfg = parse_run_config(read_file(config_path));
  } catch (const std::exception& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfigError;
  }
  if (has_seed) {
    cfg.training.seed = seed_override;
    cfg.resolved["seed"] = seed_override;
  }
  if (!output_override.empty()) {
    cfg.training.output_dir = output_override;
    cfg.resolved["output_dir"] = output_override;
  }
  cfg.training.n_threads = threads;
  if (dry_run) {
    std::cout << cfg.resolved.dump(2) << "\n";
    return kExitOk;
  }

  BuiltSystem sys;
  try {
    sys = build_system(cfg.system);
  } catch (const std::exception& err) {
    std::cerr << "config error: system: " << err.what() << "\n";
    return kExitConfigError;
  }
  mvmc::CounterRng rng(cfg.training.seed, 0x696e6974ULL, 0, 0);
  mvmc::ParamVector params = sys.model->default_params(rng);
  const mvmc::TrainResult result = mvmc::optimize(*sys.model, *sys.hamiltonian, cfg.training, params);

  nlohmann::json report;
  report["energies"] = result.energies;
  report["energy_stderr"] = result.energy_stderr;
  std::vector<std::vector<double>> overlap, bhat;
  for (std::size_t i = 0; i < result.overlap.rows(); ++i) {
    std::vector<double> row_o, row_f;
    for (std::size_t k = 0; k < result.overlap.cols(); ++k) {
      row_o.push_back(result.overlap(i, k));
      row_f.push_back(result.bhattacharyya_(i, k));
    }
    overlap.push_back(row_o);
    bhat.push_back(row_f);
  }
  report["overlap"] = overlap;
  report["bhattacharyya"] = bhat;
  report["ess_normalized"] = result.ess_normalized;
  report["steps_done"] = result.steps_done;
  report["collapse_flag"] = result.collapse_flag;
  report["nan_abort"] = result.nan_abort;
  std::filesystem::create_directories(cfg.training.output_dir);
  std::ofstream out(cfg.training.output_dir + "/report.json");
  out << report.dump(2) << "\n";
  std::cout << report.dump(2) << "\n";
  return result.nan_abort ? kExitNanAbort : kExitOk;
}

int cmd_bench_overlap(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
                      const std::string& output_dir) {
  nlohmann::json j = nlohmann::json::object();
  if (!config_path.empty()) j = nlohmann::json::parse(read_file(config_path));
  const auto grid = j.value("s_grid", std::vector<int>{2, 3, 4, 6});
  const int n_batch = j.value("n_batch", 4096);
  const int reps = j.value("reps", 50);
  const std::uint64_t seed = has_seed ? seed_override : j.value("seed", 0ULL);
  const auto rows = mvmc::benchmark_overlap(grid, n_batch, reps, seed);
  const std::string csv = mvmc::overlap_bench_csv(rows);
  std::filesystem::create_directories(output_dir);
  std::ofstream out(output_dir + "/overlap_bench.csv");
  out << csv;
  std::cout << csv;
  return kExitOk;
}

int cmd_bridge_bench(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
                     const std::string& output_dir) {
  nlohmann::json j = nlohmann::json::object();
  if (!config_path.empty()) j = nlohmann::json::parse(read_file(config_path));
  const auto grid = j.value("n_grid", std::vector<int>{1000, 10000, 20000});
  const int iters = j.value("iters", 10);
  const double clip = j.value("clip", 2.0);
  const std::uint64_t seed = has_seed ? seed_override : j.value("seed", 0ULL);
  const auto rows = mvmc::benchmark_bridge(grid, iters, clip, seed);
  const std::string csv = mvmc::bridge_bench_csv(rows);
  std::filesystem::create_directories(output_dir);
  std::ofstream out(output_dir + "/bridge_bench.csv");
  out << csv;
  std::cout << csv;
  return kExitOk;
}

int cmd_align(const std::string& structures_path, const std::string& selectors_path,
              const std::string& output_dir) {
  std::vector<mvmc::Structure> structures;
  try {
    structures = mvmc::structures_from_json(read_file(structures_path));
  } catch (const std::exception& err) {
    std::cerr << "config error: /structures: " << err.what() << "\n";
    return kExitConfigError;
  }
  mvmc::StructureGraph graph;
  try {
    graph = mvmc::build_graph(structures);
    mvmc::propagate_orbitals(graph, structures);
  } catch (const std::exception& err) {
    std::cerr << "alignment failed: " << err.what() << "\n";
    return 1;
  }

  std::filesystem::create_directories(output_dir);
  {
    std::ofstream out(output_dir + "/aligned_structures.json");
    out << mvmc::structures_to_json(structures) << "\n";
  }
  nlohmann::json gj;
  gj["root"] = structures[static_cast<std::size_t>(graph.root)].id;
  gj["order"] = graph.order;
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : graph.edges)
    edges.push_back({structures[static_cast<std::size_t>(a)].id,
                     structures[static_cast<std::size_t>(b)].id});
  gj["edges"] = edges;
  {
    std::ofstream out(output_dir + "/graph.json");
    out << gj.dump(2) << "\n";
  }
  std::cout << gj.dump(2) << "\n";

  if (!selectors_path.empty()) {
    std::vector<mvmc::Selector> selectors;
    try {
      selectors = mvmc::selectors_from_json(read_file(selectors_path));
    } catch (const std::exception& err) {
      std::cerr << "config error: /selectors: " << err.what() << "\n";
      return kExitConfigError;
    }
    nlohmann::json violations = nlohmann::json::array();
    for (std::size_t s = 0; s < selectors.size(); ++s)
      for (std::size_t t = s + 1; t < selectors.size(); ++t)
        if (mvmc::selector_det(selectors[s], selectors[t]) != 0) violations.push_back({s, t});
    std::ofstream out(output_dir + "/selector_report.json");
    out << nlohmann::json{{"n_selectors", selectors.size()}, {"violations", violations}}.dump(2)
        << "\n";
    if (!violations.empty()) {
      std::cerr << "selector orthogonality violations: " << violations.dump() << "\n";
      return 1;
    }
  }
  return kExitOk;
}

int cmd_selfcheck() {
  using Clock = std::chrono::steady_clock;
  int failures = 0;
  auto check = [&](const std::string& name, const std::function<bool()>& fn) {
    const auto start = Clock::now();
    bool ok = false;
    std::string detail;
    try {
      ok = fn();
    } catch (const std::exception& err) {
      detail = err.what();
    }
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "  (" << ms << " ms)";
    if (!ok && !detail.empty()) std::cout << "  [" << detail << "]";
    std::cout << "\n";
    if (!ok) ++failures;
  };

  check("pfaffian matches perfect-matching oracle", [] {
    mvmc::CounterRng rng(7, 1, 0, 0);
    for (int rep = 0; rep < 50; ++rep) {
      const std::size_t dim = 2 + 2 * (rep % 4);
      mvmc::Matrix m(dim, dim);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j) {
          const double v = rng.uniform(-2.0, 2.0);
          m(i, j) = v;
          m(j, i) = -v;
        }
      const mvmc::SignedLogValue pf = mvmc::pfaffian_dense(m);
      const double ref = mvmc::pfaffian_bruteforce(mvmc::SkewMatrix::from_dense(m));
      const double got = pf.value();
      if (std::fabs(got - ref) > 1e-10 * std::max(1.0, std::fabs(ref))) return false;
    }
    return true;
  });

  check("pfaffian squared equals determinant", [] {
    mvmc::CounterRng rng(11, 2, 0, 0);
    for (int rep = 0; rep < 20; ++rep) {
      mvmc::Matrix m(6, 6);
      for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i + 1; j < 6; ++j) {
          const double v = rng.uniform(-2.0, 2.0);
          m(i, j) = v;
          m(j, i) = -v;
        }
      const mvmc::SignedLogValue pf = mvmc::pfaffian_dense(m);
      const mvmc::LogDet det = mvmc::log_det(m);
      if (std::fabs(std::exp(2.0 * pf.log_abs) - std::exp(det.log_abs)) >
          1e-9 * std::exp(det.log_abs))
        return false;
    }
    return true;
  });

  check("procrustes recovers a planted rotation", [] {
    mvmc::CounterRng rng(13, 3, 0, 0);
    mvmc::Matrix src(6, 3);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 3; ++j) src(i, j) = rng.normal();
    const double theta = 0.7;
    mvmc::Matrix rot = mvmc::Matrix::identity(3);
    rot(0, 0) = std::cos(theta);
    rot(0, 1) = -std::sin(theta);
    rot(1, 0) = std::sin(theta);
    rot(1, 1) = std::cos(theta);
    const mvmc::Matrix rec = mvmc::procrustes(src, src * rot).rotation;
    return (rec - rot).frobenius_norm() < 1e-8;
  });

  check("MSIS pointwise bound on a 3-state batch", [] {
    const mvmc::HermiteGaussianModel model(3, 2);
    const mvmc::ParamVector params = model.eigenstate_params(0.5);
    const mvmc::PooledBatch batch = mvmc::hermite_iid_batch(model, params, 256, 5);
    const mvmc::RatioVector ratios = mvmc::exact_ratios(model, params);
    mvmc::overlap_msis(batch, ratios);  // throws on any bound violation
    return true;
  });

  check("ESS bounds and identical-state limit", [] {
    const mvmc::HermiteGaussianModel model(3, 2);
    const mvmc::ParamVector params = model.eigenstate_params(0.5);
    const mvmc::PooledBatch batch = mvmc::hermite_iid_batch(model, params, 256, 6);
    const mvmc::RatioVector ratios = mvmc::exact_ratios(model, params);
    for (int s = 0; s < 3; ++s) {
      const mvmc::EssResult e = mvmc::kish_ess(batch, ratios, s);
      if (e.ess < 1.0 || e.ess > static_cast<double>(batch.size())) return false;
    }
    return true;
  });

  check("snap target continuity on a fine grid", [] {
    double prev_loss = mvmc::snap_target(0.0, 1.0).loss;
    double prev_s2 = 0.0;
    for (int i = 1; i < 10000; ++i) {
      const double s2 = 6.0 * i / 9999.0;
      const mvmc::SnapResult r = mvmc::snap_target(s2, 1.0);
      // loss is continuous except exactly at midpoints; adjacent grid values
      // must never jump by more than the local slope allows
      if (std::fabs(r.loss - prev_loss) > 4.0 * 6.0 * (s2 - prev_s2) + 1e-9) return false;
      prev_loss = r.loss;
      prev_s2 = s2;
    }
    return true;
  });

  std::cout << (failures == 0 ? "selfcheck passed" : "selfcheck FAILED") << "\n";
  return failures == 0 ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-state variational Monte Carlo toolkit"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  bool has_seed = false;
  int threads = 1;
  std::string output_dir;
  bool dry_run = false;
  app.add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
    has_seed = true;
  });
  app.add_option("--threads", threads, "worker thread cap");
  app.add_option("--output-dir", output_dir, "override the output directory");
  app.add_flag("--dry-run", dry_run, "validate and print the resolved config only");

  std::string run_config, bench_config, bridge_config, structures_path, selectors_path;
  CLI::App* run = app.add_subcommand("run", "full optimization run");
  run->add_option("config", run_config, "run config JSON")->required();
  CLI::App* bench = app.add_subcommand("bench-overlap", "overlap estimator variance benchmark");
  bench->add_option("config", bench_config, "benchmark config JSON");
  CLI::App* bridge = app.add_subcommand("bridge-bench", "bridge sampling benchmark");
  bridge->add_option("config", bridge_config, "benchmark config JSON");
  CLI::App* align = app.add_subcommand("align", "pretraining target alignment");
  align->add_option("structures", structures_path, "structure payload JSON")->required();
  align->add_option("selectors", selectors_path, "selector JSON");
  app.add_subcommand("selfcheck", "fast invariant battery");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(run_config, seed, has_seed, output_dir, threads, dry_run);
    if (bench->parsed())
      return cmd_bench_overlap(bench_config, seed, has_seed,
                               output_dir.empty() ? "out" : output_dir);
    if (bridge->parsed())
      return cmd_bridge_bench(bridge_config, seed, has_seed,
                              output_dir.empty() ? "out" : output_dir);
    if (align->parsed())
      return cmd_align(structures_path, selectors_path, output_dir.empty() ? "out" : output_dir);
    return cmd_selfcheck();
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
