#pragma once

// Synthetic test tensors and a seeded experiment runner.

#include "tucker/solvers.hpp"
#include "tucker/tensor.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tucker {

/// Sum of n_terms rank-1 terms w_i x_i o y_i o z_i with sparse factors, where
/// w_i = gamma / i for i <= n_terms_big and 1 / i afterwards. Each factor of
/// length m has ceil(sparsity * m) nonzeros at uniformly sampled positions,
/// with N(0, 1) values.
DenseTensor gen_sparse_sum(const Dims& dims, std::size_t n_terms, std::size_t n_terms_big, double gamma,
                           double sparsity, std::uint64_t seed);

/// n x n x n sparse-sum tensor with n terms.
DenseTensor gen_tensor_a(std::size_t n, std::size_t n_terms_big, double gamma, double sparsity, std::uint64_t seed);

enum class Decay { Slow, Fast, SShape };

/// v_i for i = 1..n: 1/i^2, exp(-i/7), or 0.001 + 1/(1 + exp(i - 29)).
Vector decay_vector(std::size_t n, Decay decay);

/// tendiag(v) x_1 A_1 x_2 A_2 x_3 A_3 with A_k orthonormal bases of n x n
/// Gaussian matrices, so each unfolding has singular values v.
DenseTensor gen_tensor_b(std::size_t n, Decay decay, std::uint64_t seed);

/// Sparse-sum tensor with unequal mode sizes and dims[0] terms.
DenseTensor gen_tensor_c(const Dims& dims, std::uint64_t seed, std::size_t n_terms_big = 50, double gamma = 1000.0,
                         double sparsity = 0.05);

/// Gaussian core of size `ranks` multiplied by orthonormal n_k x r_k factors:
/// multilinear rank exactly `ranks` (almost surely).
DenseTensor gen_exact_rank(const Dims& dims, const std::vector<std::size_t>& ranks, std::uint64_t seed);

/// Textual recipe: kind[:key=value,...] (',' or ';' between options). Kinds:
/// a, b-slow, b-fast, b-sshape, c, exact. Keys: n, dims (AxBxC), ranks
/// (AxBxC), big, gamma, sparsity.
struct Recipe {
  std::string kind = "a";
  std::size_t n = 100;
  Dims dims;
  std::vector<std::size_t> ranks;
  std::size_t big = 50;
  double gamma = 1000.0;
  double sparsity = 0.05;
};

/// Throws std::invalid_argument on malformed text.
Recipe parse_recipe(const std::string& text);
std::string to_string(const Recipe& r);
DenseTensor generate(const Recipe& r, std::uint64_t seed);

struct ExperimentPlan {
  Recipe recipe;
  std::vector<Algorithm> algorithms;
  std::vector<SolverConfig> configs;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  /// Run cells on OpenMP threads. Timings are noisier under contention.
  bool parallel_cells = true;
};

struct RunReport {
  Algorithm algorithm = Algorithm::Thosvd;
  std::size_t config_index = 0;
  SolverConfig config;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double re = 0.0;
  double seconds = 0.0;
  CostTally cost;
  std::vector<int> power_counts;
  std::vector<double> final_alpha;
};

/// Seed of trial `trial` under config `config_index`, shared by every
/// algorithm so comparisons are paired.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t config_index, std::size_t trial);
/// Seed used to generate the plan's tensor.
std::uint64_t tensor_seed(std::uint64_t master_seed);

/// Runs every (config, algorithm, trial) cell on the plan's generated tensor.
/// Failed cells are reported with ok = false. Output order: config, then
/// algorithm, then trial.
std::vector<RunReport> run_experiment(const ExperimentPlan& plan);
std::vector<RunReport> run_experiment(const ExperimentPlan& plan, const DenseTensor& t);

struct CellSummary {
  Algorithm algorithm = Algorithm::Thosvd;
  std::size_t config_index = 0;
  std::size_t runs = 0;
  std::size_t failures = 0;
  double mean_re = 0.0;
  double median_re = 0.0;
  double mean_seconds = 0.0;
  double median_seconds = 0.0;
};

/// Mean and median per (algorithm, config) over successful trials,
/// independent of report order.
std::vector<CellSummary> aggregate(const std::vector<RunReport>& reports);

double median(std::vector<double> values);

/// Header: algorithm,recipe,r,s,q,trial,seed,re,seconds,alpha_final.
/// Tuples are joined with ';'. With timing off the seconds column is empty,
/// which makes reruns byte-identical.
void write_csv(std::ostream& out, const std::vector<RunReport>& reports, const std::string& recipe, bool timing = true);

}  // namespace tucker
