#include "wcon/barycenter.hpp"
#include "wcon/cbo.hpp"
#include "wcon/dynamics.hpp"
#include "wcon/io.hpp"
#include "wcon/ot.hpp"
#include "wcon/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config file: flat key-value sections, unknown keys rejected.
// ---------------------------------------------------------------------------

using Section = std::map<std::string, std::string>;
using Config = std::map<std::string, Section>;

const std::map<std::string, std::set<std::string>> kAllowedKeys = {
    {"problem", {"inputs", "weights", "target_shape", "target_file", "M", "noise"}},
    {"dynamics",
     {"tau", "steps", "n_support", "tol", "max_iter", "merge_tol", "snapshot_every",
      "weight_rule", "alpha"}},
    {"cbo",
     {"N", "n", "d", "tau", "sigma1", "sigma2", "alpha", "k_max", "seed",
      "snapshot_every", "per_particle_noise"}},
    {"output", {"out_dir"}},
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  Config cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      if (!kAllowedKeys.count(section))
        throw std::invalid_argument("config: unknown section [" + section + "]");
      cfg[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos || section.empty())
      throw std::invalid_argument("config: malformed line " + std::to_string(lineno));
    const std::string key = trim(t.substr(0, eq));
    if (!kAllowedKeys.at(section).count(key))
      throw std::invalid_argument("config: unknown key '" + key + "' in [" + section + "]");
    cfg[section][key] = trim(t.substr(eq + 1));
  }
  return cfg;
}

std::string get(const Config& cfg, const std::string& sec, const std::string& key,
                const std::string& fallback) {
  auto s = cfg.find(sec);
  if (s == cfg.end()) return fallback;
  auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

bool has(const Config& cfg, const std::string& sec, const std::string& key) {
  auto s = cfg.find(sec);
  return s != cfg.end() && s->second.count(key) > 0;
}

double to_double(const std::string& v, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + what + ": '" + v + "'");
  }
}

long long to_int(const std::string& v, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + what + ": '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::istringstream ss(v);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

struct GlobalOpts {
  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int threads = 1;
};

std::string resolve_out_dir(const Config& cfg, const GlobalOpts& g) {
  std::string dir = g.out_override.empty() ? get(cfg, "output", "out_dir", ".") : g.out_override;
  fs::create_directories(dir);
  return dir;
}

wcon::AtomicMeasure load_target(const Config& cfg, const GlobalOpts& g,
                                std::uint64_t default_seed) {
  if (has(cfg, "problem", "target_file"))
    return wcon::read_point_cloud_file(get(cfg, "problem", "target_file", ""));
  if (has(cfg, "problem", "target_shape")) {
    const int M = static_cast<int>(to_int(get(cfg, "problem", "M", "2000"), "M"));
    const double noise = to_double(get(cfg, "problem", "noise", "1"), "noise");
    const std::uint64_t seed = g.seed_set ? g.seed_override : default_seed;
    return wcon::make_target(get(cfg, "problem", "target_shape", ""), M, seed, noise);
  }
  throw std::invalid_argument("config: needs target_shape or target_file in [problem]");
}

std::vector<wcon::AtomicMeasure> load_inputs(const Config& cfg) {
  if (!has(cfg, "problem", "inputs"))
    throw std::invalid_argument("config: [problem] inputs is required");
  std::vector<wcon::AtomicMeasure> measures;
  for (const auto& path : split_list(get(cfg, "problem", "inputs", "")))
    measures.push_back(wcon::read_point_cloud_file(path));
  if (measures.empty()) throw std::invalid_argument("config: [problem] inputs is empty");
  return measures;
}

std::vector<double> load_weights(const Config& cfg, std::size_t n_agents) {
  if (!has(cfg, "problem", "weights")) return std::vector<double>(n_agents, 1.0);
  std::vector<double> w;
  for (const auto& tok : split_list(get(cfg, "problem", "weights", "")))
    w.push_back(to_double(tok, "weights"));
  if (w.size() != n_agents)
    throw std::invalid_argument("config: weights count does not match inputs count");
  return w;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_w2(const std::string& file_a, const std::string& file_b) {
  const auto mu = wcon::read_point_cloud_file(file_a);
  const auto nu = wcon::read_point_cloud_file(file_b);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", wcon::w2(mu, nu));
  std::cout << buf << "\n";
  return 0;
}

int cmd_barycenter(const GlobalOpts& g) {
  const Config cfg = parse_config(g.config_path);
  auto measures = load_inputs(cfg);
  const auto weights = load_weights(cfg, measures.size());
  wcon::Ensemble agents(std::move(measures));

  wcon::Index n_support =
      static_cast<wcon::Index>(to_int(get(cfg, "dynamics", "n_support", "0"), "n_support"));
  if (n_support == 0) {
    for (const auto& a : agents.agents()) n_support = std::max(n_support, a.size());
  }
  wcon::BarycenterProblem problem{
      agents, wcon::normalize_weights(weights), n_support,
      to_double(get(cfg, "dynamics", "tol", "1e-9"), "tol"),
      static_cast<int>(to_int(get(cfg, "dynamics", "max_iter", "100"), "max_iter"))};
  const auto result = wcon::free_support_barycenter(
      problem, wcon::default_barycenter_init(agents, problem.weights, n_support));

  const std::string out_dir = resolve_out_dir(cfg, g);
  wcon::write_point_cloud_file(out_dir + "/barycenter.txt", result.measure);
  json summary = {{"functional", result.functional},
                  {"iterations", result.iterations},
                  {"converged", result.converged}};
  std::ofstream js(out_dir + "/summary.json");
  js << summary.dump(2) << "\n";
  std::cout << "functional " << wcon::format_double(result.functional) << "\n";
  return 0;
}

wcon::WeightFn make_weight_rule(const Config& cfg, const GlobalOpts& g) {
  const std::string rule = get(cfg, "dynamics", "weight_rule", "constant");
  if (rule == "constant") return wcon::constant_weights();
  if (rule == "gibbs") {
    const double alpha = to_double(get(cfg, "dynamics", "alpha", "1"), "alpha");
    auto objective = wcon::w2_objective(load_target(cfg, g, 0));
    return [alpha, objective](const wcon::Ensemble& e) {
      std::vector<double> obj(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) obj[i] = objective(e.agent(i));
      return wcon::gibbs_weights(obj, alpha);
    };
  }
  throw std::invalid_argument("config: unknown weight_rule '" + rule + "'");
}

int cmd_consensus(const GlobalOpts& g) {
  const Config cfg = parse_config(g.config_path);
  wcon::Ensemble ensemble(load_inputs(cfg));

  wcon::ConsensusConfig cc;
  cc.tau = to_double(get(cfg, "dynamics", "tau", "0.1"), "tau");
  cc.steps = static_cast<int>(to_int(get(cfg, "dynamics", "steps", "1"), "steps"));
  cc.n_support =
      static_cast<wcon::Index>(to_int(get(cfg, "dynamics", "n_support", "0"), "n_support"));
  cc.bary_tol = to_double(get(cfg, "dynamics", "tol", "1e-9"), "tol");
  cc.bary_max_iter = static_cast<int>(to_int(get(cfg, "dynamics", "max_iter", "100"), "max_iter"));
  cc.merge_tol = to_double(get(cfg, "dynamics", "merge_tol", "1e-12"), "merge_tol");
  cc.snapshot_every =
      static_cast<int>(to_int(get(cfg, "dynamics", "snapshot_every", "0"), "snapshot_every"));
  cc.weight_fn = make_weight_rule(cfg, g);

  const auto record = wcon::run_consensus(ensemble, cc);

  const std::string out_dir = resolve_out_dir(cfg, g);
  std::ofstream csv(out_dir + "/trajectory.csv");
  csv << "step,agent,w2_to_barycenter,diameter,weight\n";
  for (const auto& e : record.entries) {
    for (std::size_t i = 0; i < e.weights.size(); ++i)
      csv << e.step << ',' << i << ',' << wcon::format_double(e.w2_to_barycenter[i]) << ','
          << wcon::format_double(e.diameter) << ',' << wcon::format_double(e.weights[i])
          << "\n";
    if (e.snapshot) {
      for (std::size_t i = 0; i < e.snapshot->size(); ++i)
        wcon::write_point_cloud_file(out_dir + "/snap_" + std::to_string(e.step) + "_" +
                                         std::to_string(i) + ".txt",
                                     e.snapshot->agent(i));
    }
  }
  std::cout << "final diameter " << wcon::format_double(record.entries.back().diameter)
            << "\n";
  return 0;
}

int cmd_cbo(const GlobalOpts& g) {
  const Config cfg = parse_config(g.config_path);

  wcon::CboConfig cc;
  cc.N = static_cast<int>(to_int(get(cfg, "cbo", "N", "1"), "N"));
  cc.n = static_cast<wcon::Index>(to_int(get(cfg, "cbo", "n", "1"), "n"));
  cc.d = static_cast<int>(to_int(get(cfg, "cbo", "d", "2"), "d"));
  cc.tau = to_double(get(cfg, "cbo", "tau", "0.1"), "tau");
  cc.sigma1 = to_double(get(cfg, "cbo", "sigma1", "0"), "sigma1");
  cc.sigma2 = to_double(get(cfg, "cbo", "sigma2", "0"), "sigma2");
  cc.alpha = to_double(get(cfg, "cbo", "alpha", "1"), "alpha");
  cc.k_max = static_cast<int>(to_int(get(cfg, "cbo", "k_max", "1"), "k_max"));
  cc.seed = static_cast<std::uint64_t>(to_int(get(cfg, "cbo", "seed", "0"), "seed"));
  cc.snapshot_every =
      static_cast<int>(to_int(get(cfg, "cbo", "snapshot_every", "0"), "snapshot_every"));
  cc.per_particle_noise = get(cfg, "cbo", "per_particle_noise", "false") == "true";
  if (g.seed_set) cc.seed = g.seed_override;

  const auto target = load_target(cfg, g, cc.seed + 1);
  const auto objective = wcon::w2_objective(target);

  wcon::Ensemble ensemble = has(cfg, "problem", "inputs")
                                ? wcon::Ensemble(load_inputs(cfg))
                                : wcon::sample_initial_ensemble(cc);

  const auto record = wcon::run_cbo(ensemble, objective, cc);

  const std::string out_dir = resolve_out_dir(cfg, g);
  {
    std::ofstream csv(out_dir + "/record.csv");
    csv << "iter,agent,objective,w2_to_barycenter,sigma\n";
    for (const auto& it : record.iterations)
      for (std::size_t i = 0; i < it.objectives.size(); ++i)
        csv << it.iter << ',' << i << ',' << wcon::format_double(it.objectives[i]) << ','
            << wcon::format_double(it.w2_to_barycenter[i]) << ','
            << wcon::format_double(it.sigma[i]) << "\n";
  }
  {
    std::ofstream csv(out_dir + "/best.csv");
    csv << "iter,best_agent,best_objective,barycenter_objective\n";
    for (const auto& it : record.iterations)
      csv << it.iter << ',' << it.best_agent << ','
          << wcon::format_double(it.best_objective) << ','
          << wcon::format_double(it.barycenter_objective) << "\n";
  }
  for (const auto& snap : record.snapshots)
    for (std::size_t i = 0; i < snap.ensemble.size(); ++i)
      wcon::write_point_cloud_file(out_dir + "/snap_" + std::to_string(snap.iter) + "_" +
                                       std::to_string(i) + ".txt",
                                   snap.ensemble.agent(i));
  wcon::write_point_cloud_file(out_dir + "/best_agent.txt",
                               record.final_ensemble.agent(record.final_best_agent));
  wcon::write_point_cloud_file(out_dir + "/barycenter.txt", record.final_barycenter);
  std::cout << "best objective " << wcon::format_double(record.iterations.back().best_objective)
            << "\n";
  return 0;
}

int cmd_make_target(const std::string& shape, int M, const GlobalOpts& g,
                    const std::string& out_file, double noise) {
  const std::uint64_t seed = g.seed_set ? g.seed_override : 0;
  const auto target = wcon::make_target(shape, M, seed, noise);
  if (out_file.empty())
    wcon::write_point_cloud(std::cout, target);
  else
    wcon::write_point_cloud_file(out_file, target);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus dynamics and consensus-based optimization for atomic measures "
               "in 2-Wasserstein space"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--config", g.config_path, "Run configuration file");
  auto* seed_opt = app.add_option("--seed", g.seed_override, "Override the config seed");
  app.add_option("--out", g.out_override, "Override the output directory");
  app.add_option("--threads", g.threads, "Worker threads for per-agent solves");

  auto* w2cmd = app.add_subcommand("w2", "W2 distance between two point-cloud files");
  std::string file_a, file_b;
  w2cmd->add_option("file_a", file_a, "First measure")->required();
  w2cmd->add_option("file_b", file_b, "Second measure")->required();

  auto* barycmd = app.add_subcommand("barycenter", "Weighted free-support barycenter");
  auto* conscmd = app.add_subcommand("consensus", "Explicit-Euler consensus dynamics");
  auto* cbocmd = app.add_subcommand("cbo", "Measure-valued consensus-based optimization");

  auto* mktcmd = app.add_subcommand("make-target", "Generate a target shape point cloud");
  std::string shape, target_out;
  int target_m = 2000;
  double target_noise = 1.0;
  mktcmd->add_option("shape", shape, "gaussians4 | moons | circles | ring")->required();
  mktcmd->add_option("M", target_m, "Number of atoms");
  mktcmd->add_option("--out-file", target_out, "Output file (default: stdout)");
  mktcmd->add_option("--noise", target_noise, "Noise scale (1 = default, 0 = exact shape)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  g.seed_set = seed_opt->count() > 0;
  wcon::set_num_threads(g.threads);

  try {
    if (w2cmd->parsed()) return cmd_w2(file_a, file_b);
    if (mktcmd->parsed()) return cmd_make_target(shape, target_m, g, target_out, target_noise);
    if (g.config_path.empty()) throw std::invalid_argument("--config is required");
    if (barycmd->parsed()) return cmd_barycenter(g);
    if (conscmd->parsed()) return cmd_consensus(g);
    if (cbocmd->parsed()) return cmd_cbo(g);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
