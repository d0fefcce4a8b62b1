#include "tucker/cli.hpp"

#include "tucker/bounds.hpp"
#include "tucker/dtns_io.hpp"
#include "tucker/kernels.hpp"
#include "tucker/solvers.hpp"
#include "tucker/testbed.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace tucker {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Options {
  std::string input;
  std::string recipe;
  std::string summary;
  std::string out;
  std::vector<std::string> algorithms;
  std::vector<std::string> ranks;
  std::string oversample;
  int power = 1;
  std::string order;
  std::string sketch = "gaussian";
  double pve_tol = 0.5;
  bool pve_tol_set = false;
  int qmax = 10000;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t trials = 1;
  bool no_timing = false;
  bool no_shift = false;
  bool serial_cells = false;
  std::string j;
  std::string beta;
  std::string gamma;
};

// Thrown for user errors that map to exit code 2.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split(const std::string& text, const std::string& seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (seps.find(c) != std::string::npos) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  for (const auto& item : split(text, ",x")) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size() || item[0] == '-')
      throw UsageError(std::string("bad ") + what + " '" + text + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& item : split(text, ",")) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) throw UsageError(std::string("bad ") + what + " '" + text + "'");
    out.push_back(v);
  }
  return out;
}

template <typename T>
std::vector<T> broadcast(std::vector<T> v, std::size_t d, const char* what) {
  if (v.size() == 1 && d > 1) v.assign(d, v[0]);
  if (v.size() != d)
    throw UsageError(std::string(what) + " needs 1 or " + std::to_string(d) + " entries, got " +
                     std::to_string(v.size()));
  return v;
}

Algorithm algorithm_from(const std::string& name) {
  const auto a = parse_algorithm(name);
  if (!a) throw UsageError("unknown algorithm '" + name + "'");
  return *a;
}

std::vector<Algorithm> algorithm_list(const Options& o) {
  std::vector<Algorithm> out;
  for (const auto& entry : o.algorithms)
    for (const auto& name : split(entry, ",")) out.push_back(algorithm_from(name));
  if (out.empty()) throw UsageError("--algorithm is required");
  return out;
}

std::uint64_t resolve_seed(Options& o, std::ostream& err) {
  if (!o.seed_set) {
    std::random_device rd;
    o.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    o.seed_set = true;
    err << "seed: " << o.seed << "\n";
  }
  return o.seed;
}

std::string input_label(const Options& o) { return o.input.empty() ? "recipe:" + o.recipe : "file:" + o.input; }

DenseTensor load_input(const Options& o) {
  if (o.input.empty() == o.recipe.empty()) throw UsageError("give exactly one of --input and --recipe");
  if (!o.input.empty()) return load_dtns(o.input);
  return generate(parse_recipe(o.recipe), tensor_seed(o.seed));
}

SolverConfig solver_config(const Options& o, const Dims& dims, const std::string& ranks_text) {
  const std::size_t d = dims.size();
  SolverConfig cfg;
  cfg.ranks = broadcast(parse_sizes(ranks_text, "--ranks"), d, "--ranks");
  if (!o.oversample.empty()) cfg.oversampling = broadcast(parse_sizes(o.oversample, "--oversample"), d, "--oversample");
  cfg.power = o.power;
  if (!o.order.empty()) {
    for (auto m : parse_sizes(o.order, "--order")) {
      if (m < 1) throw UsageError("--order is 1-based");
      cfg.order.push_back(m - 1);
    }
  }
  const auto family = parse_sketch_family(o.sketch);
  if (!family) throw UsageError("unknown sketch family '" + o.sketch + "'");
  cfg.sketch.family = *family;
  cfg.sketch.seed = o.seed;
  cfg.shift_enabled = !o.no_shift;
  cfg.pve = PveControl{o.pve_tol, o.qmax};
  return cfg;
}

// shifted-sthosvd with an explicit PVE tolerance runs the PVE-controlled solver.
Algorithm effective_algorithm(Algorithm a, const Options& o) {
  return (a == Algorithm::ShiftedSthosvd && o.pve_tol_set) ? Algorithm::Pve : a;
}

json trace_json(const ShiftTrace& trace) {
  json modes = json::array();
  for (const auto& m : trace.modes) {
    json steps = json::array();
    for (const auto& s : m.steps) steps.push_back({{"iteration", s.iteration}, {"alpha", s.alpha}, {"sigma_last", s.sigma_last}});
    modes.push_back({{"mode", m.mode + 1}, {"final_alpha", m.final_alpha}, {"steps", steps}});
  }
  return modes;
}

struct Decomposition {
  DenseTensor tensor;
  Algorithm algorithm;
  SolverConfig config;
  SolveResult result;
  double seconds = 0.0;
  double re = 0.0;
};

Decomposition run_decomposition(const Options& o) {
  Decomposition dec;
  dec.tensor = load_input(o);
  if (o.ranks.size() != 1) throw UsageError("give --ranks exactly once");
  const auto algorithms = algorithm_list(o);
  if (algorithms.size() != 1) throw UsageError("give exactly one --algorithm");
  dec.algorithm = effective_algorithm(algorithms[0], o);
  dec.config = solver_config(o, dec.tensor.dims(), o.ranks[0]);
  const auto start = std::chrono::steady_clock::now();
  dec.result = solve(dec.algorithm, dec.tensor, dec.config);
  dec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  dec.re = relative_error(dec.tensor, dec.result.factorization);
  return dec;
}

json summary_json(const Options& o, const Decomposition& dec) {
  const bool randomized = is_randomized(dec.algorithm);
  const SolverConfig resolved = resolve_config(dec.tensor.dims(), dec.config, randomized);
  json j;
  j["algorithm"] = std::string(to_string(dec.algorithm));
  j["dims"] = dec.tensor.dims();
  j["ranks"] = resolved.ranks;
  std::vector<std::size_t> order1;
  for (auto m : resolved.order) order1.push_back(m + 1);
  j["order"] = order1;
  if (randomized) {
    j["s"] = resolved.oversampling;
    if (dec.algorithm == Algorithm::Pve) {
      j["q"] = dec.result.power_counts;
      j["pve_tol"] = o.pve_tol;
      j["qmax"] = o.qmax;
    } else {
      j["q"] = resolved.power;
    }
    j["power_counts"] = dec.result.power_counts;
    j["sketch"] = std::string(to_string(resolved.sketch.family));
    j["shift_enabled"] = resolved.shift_enabled;
  }
  j["relative_error"] = dec.re;
  j["seconds"] = dec.seconds;
  j["seed"] = o.seed;
  j["shift_trace"] = trace_json(dec.result.trace);
  j["cost"] = {{"mm", dec.result.cost.mm}, {"svd", dec.result.cost.svd}};
  j["input"] = input_label(o);
  return j;
}

void add_input_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--input", o.input, "DTNS1 tensor file");
  cmd->add_option("--recipe", o.recipe, "generator recipe, e.g. a:n=100 or c:dims=60x70x80");
}

void add_solver_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--algorithm", o.algorithms,
                  "thosvd, sthosvd, rand-thosvd, rand-sthosvd, shifted-thosvd, shifted-sthosvd, holistic, "
                  "holistic-shifted, pve");
  cmd->add_option("--ranks", o.ranks, "Tucker ranks, comma separated (one value is broadcast)");
  cmd->add_option("--oversample", o.oversample, "oversampling s per mode (default 10)");
  cmd->add_option("--power", o.power, "power iterations q (default 1)");
  cmd->add_option("--order", o.order, "processing order, 1-based, e.g. 3,2,1");
  cmd->add_option("--sketch", o.sketch, "gaussian, uniform, kr-gaussian, kr-uniform");
  cmd->add_option("--pve-tol", o.pve_tol, "PVE tolerance (default 0.5)")->each([&o](const std::string&) {
    o.pve_tol_set = true;
  });
  cmd->add_option("--qmax", o.qmax, "PVE iteration cap (default 10000)");
  cmd->add_option("--seed", o.seed, "master seed; random and logged when absent")->each([&o](const std::string&) {
    o.seed_set = true;
  });
  cmd->add_flag("--no-shift", o.no_shift, "keep the shift at zero in shifted solvers");
}

int cmd_decompose(Options& o, std::ostream& out, std::ostream& err) {
  resolve_seed(o, err);
  Decomposition dec = run_decomposition(o);
  const fs::path dir = o.out.empty() ? fs::path("tucker_out") : fs::path(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  save_dtns(dir / "core.dtns", dec.result.factorization.core);
  for (std::size_t k = 0; k < dec.result.factorization.factors.size(); ++k)
    save_matrix_dtns(dir / ("factor_" + std::to_string(k + 1) + ".dtns"), dec.result.factorization.factors[k]);
  const json j = summary_json(o, dec);
  std::ofstream file(dir / "summary.json");
  file << j.dump(2) << "\n";
  if (!file) throw IoError("cannot write " + (dir / "summary.json").string());
  out << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_bench(Options& o, std::ostream& out, std::ostream& err) {
  resolve_seed(o, err);
  ExperimentPlan plan;
  if (o.input.empty() == o.recipe.empty()) throw UsageError("give exactly one of --input and --recipe");
  if (o.trials < 1) throw UsageError("--trials must be at least 1");
  plan.algorithms = algorithm_list(o);
  for (auto& a : plan.algorithms) a = effective_algorithm(a, o);
  plan.trials = o.trials;
  plan.master_seed = o.seed;
  plan.parallel_cells = !o.serial_cells;
  const DenseTensor t = load_input(o);
  if (o.ranks.empty()) throw UsageError("--ranks is required");
  for (const auto& r : o.ranks) plan.configs.push_back(solver_config(o, t.dims(), r));
  std::string label = o.input;
  if (!o.recipe.empty()) {
    plan.recipe = parse_recipe(o.recipe);
    label = to_string(plan.recipe);
  }
  const auto reports = run_experiment(plan, t);
  for (const auto& r : reports)
    if (!r.ok) err << "cell " << to_string(r.algorithm) << " trial " << r.trial << " failed: " << r.error << "\n";

  std::ostringstream csv;
  write_csv(csv, reports, label, !o.no_timing);
  if (o.out.empty()) {
    out << csv.str();
  } else {
    std::ofstream file(o.out, std::ios::binary);
    file << csv.str();
    if (!file) throw IoError("cannot write " + o.out);
  }
  return kExitOk;
}

void load_summary(Options& o) {
  std::ifstream in(o.summary);
  if (!in) throw IoError("cannot open summary " + o.summary);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("cannot parse summary " + o.summary + ": " + e.what());
  }
  try {
    o.algorithms = {j.at("algorithm").get<std::string>()};
    std::string ranks;
    for (auto r : j.at("ranks").get<std::vector<std::size_t>>()) ranks += (ranks.empty() ? "" : ",") + std::to_string(r);
    o.ranks = {ranks};
    std::string order;
    for (auto m : j.at("order").get<std::vector<std::size_t>>()) order += (order.empty() ? "" : ",") + std::to_string(m);
    o.order = order;
    o.seed = j.at("seed").get<std::uint64_t>();
    o.seed_set = true;
    if (j.contains("s")) {
      std::string s;
      for (auto v : j.at("s").get<std::vector<std::size_t>>()) s += (s.empty() ? "" : ",") + std::to_string(v);
      o.oversample = s;
      o.sketch = j.at("sketch").get<std::string>();
      o.no_shift = !j.at("shift_enabled").get<bool>();
    }
    if (j.contains("q") && j.at("q").is_number_integer()) o.power = j.at("q").get<int>();
    if (j.contains("pve_tol")) {
      o.pve_tol = j.at("pve_tol").get<double>();
      o.qmax = j.at("qmax").get<int>();
    }
    const auto input = j.at("input").get<std::string>();
    if (input.rfind("recipe:", 0) == 0) {
      o.recipe = input.substr(7);
      o.input.clear();
    } else if (input.rfind("file:", 0) == 0) {
      o.input = input.substr(5);
      o.recipe.clear();
    } else {
      throw UsageError("summary has an unrecognized input field");
    }
  } catch (const json::exception& e) {
    throw UsageError("summary " + o.summary + " is missing fields: " + e.what());
  }
}

int cmd_bound(Options& o, std::ostream& out, std::ostream& err) {
  if (!o.summary.empty()) load_summary(o);
  resolve_seed(o, err);
  Decomposition dec = run_decomposition(o);
  if (dec.algorithm == Algorithm::Holistic || dec.algorithm == Algorithm::HolisticShifted)
    throw UsageError("no error bound is implemented for the holistic solvers");

  const double norm = frobenius_norm(dec.tensor);
  const double observed = dec.re * norm;
  json j;
  j["algorithm"] = std::string(to_string(dec.algorithm));
  j["observed_error"] = observed;
  j["relative_error"] = dec.re;

  BoundReport report;
  if (!is_randomized(dec.algorithm)) {
    report = deterministic_error_bound(unfolding_spectra(dec.tensor), dec.config.ranks);
    j["bound_kind"] = "deterministic";
  } else {
    const SolverConfig resolved = resolve_config(dec.tensor.dims(), dec.config, true);
    BoundParams p = bound_params_for(dec.tensor, resolved, dec.result.trace);
    const std::size_t d = dec.tensor.order();
    if (!o.j.empty()) p.j = broadcast(parse_sizes(o.j, "--j"), d, "--j");
    if (!o.beta.empty()) p.beta = broadcast(parse_doubles(o.beta, "--beta"), d, "--beta");
    if (!o.gamma.empty()) p.gamma = broadcast(parse_doubles(o.gamma, "--gamma"), d, "--gamma");
    p = with_default_knobs(std::move(p));
    const bool t_branch = dec.algorithm == Algorithm::RandThosvd || dec.algorithm == Algorithm::ShiftedThosvd;
    try {
      report = t_branch ? evaluate_thosvd_bound(p) : evaluate_sthosvd_bound(p);
    } catch (const std::domain_error& e) {
      throw UsageError(e.what());
    }
    j["bound_kind"] = t_branch ? "randomized-thosvd" : "randomized-sthosvd";
    j["j"] = p.j;
    j["beta"] = p.beta;
    j["gamma"] = p.gamma;
  }
  j["bound"] = report.value;
  j["failure_probability"] = report.failure;
  j["probability_floor"] = report.probability_floor;
  j["hypotheses_hold"] = report.hypotheses_hold;
  j["bound_holds"] = observed <= report.value;
  out << j.dump(2) << "\n";
  if (!report.hypotheses_hold) {
    err << "bound hypotheses violated: " << report.violation << "\n";
    return kExitHypothesis;
  }
  return kExitOk;
}

int cmd_gen(Options& o, std::ostream& out, std::ostream& err) {
  if (o.recipe.empty()) throw UsageError("gen needs --recipe");
  if (o.out.empty()) throw UsageError("gen needs --out");
  resolve_seed(o, err);
  const DenseTensor t = generate(parse_recipe(o.recipe), tensor_seed(o.seed));
  save_dtns(o.out, t);
  out << "wrote " << o.out << " (" << t.size() << " entries)\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  configure_threads_from_env();
  Options o;
  CLI::App app{"Tucker decompositions with randomized and shifted HOSVD solvers"};
  app.require_subcommand(1);

  auto* decompose = app.add_subcommand("decompose", "decompose one tensor and write core, factors and summary.json");
  add_input_options(decompose, o);
  add_solver_options(decompose, o);
  decompose->add_option("--out", o.out, "output directory (default tucker_out)");

  auto* bench = app.add_subcommand("bench", "run a seeded grid of solvers and write CSV");
  add_input_options(bench, o);
  add_solver_options(bench, o);
  bench->add_option("--trials", o.trials, "trials per cell (default 1)");
  bench->add_option("--out", o.out, "CSV path (default stdout)");
  bench->add_flag("--no-timing", o.no_timing, "leave the seconds column empty");
  bench->add_flag("--serial-cells", o.serial_cells, "run cells one at a time");

  auto* bound = app.add_subcommand("bound", "decompose and report the matching error bound");
  add_input_options(bound, o);
  add_solver_options(bound, o);
  bound->add_option("--summary", o.summary, "rerun the decomposition described by a summary.json");
  bound->add_option("--j", o.j, "analysis index j per mode (default max(1, r-1))");
  bound->add_option("--beta", o.beta, "beta per mode (default 2)");
  bound->add_option("--gamma", o.gamma, "gamma per mode (default 2)");

  auto* gen = app.add_subcommand("gen", "generate a synthetic tensor as DTNS1");
  gen->add_option("--recipe", o.recipe, "generator recipe")->required();
  gen->add_option("--seed", o.seed, "seed; random and logged when absent")->each([&o](const std::string&) {
    o.seed_set = true;
  });
  gen->add_option("--out", o.out, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (decompose->parsed()) return cmd_decompose(o, out, err);
    if (bench->parsed()) return cmd_bench(o, out, err);
    if (bound->parsed()) return cmd_bound(o, out, err);
    if (gen->parsed()) return cmd_gen(o, out, err);
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const BoundHypothesisError& e) {
    err << "bound hypotheses violated: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitConfig;
}

}  // namespace tucker
