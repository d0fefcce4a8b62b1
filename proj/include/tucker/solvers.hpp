#pragma once

// Fixed Tucker-rank solvers.
//
// Deterministic: thosvd, sthosvd.
// Randomized baseline (sketch + plain power iterations): rand_thosvd, rand_sthosvd.
// Adaptive-shift randomized variants: shifted_rand_thosvd, shifted_rand_sthosvd.
// Holistic randomized ST-HOSVD (compress to an l-sized core first, then run
// deterministic ST-HOSVD and lift): holistic_rand_sthosvd.
// Shifted ST variant with per-mode power counts chosen by the PVE stopping
// rule: pve_shifted_sthosvd.
//
// Modes are 0-based throughout the C++ API.

#include "tucker/sketch.hpp"
#include "tucker/tensor.hpp"

#include <optional>
#include <stdexcept>
#include <string_view>

namespace tucker {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for inputs that violate a solver's preconditions.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TuckerFactorization {
  DenseTensor core;
  std::vector<Matrix> factors;
};

struct PveControl {
  double tol = 0.5;
  int q_max = 10000;
};

struct SolverConfig {
  std::vector<std::size_t> ranks;
  /// Per-mode oversampling s_k; empty means 10 for every mode.
  std::vector<std::size_t> oversampling;
  /// Power parameter q, ignored when `pve` is set.
  int power = 1;
  std::optional<PveControl> pve;
  /// Processing order as a permutation of 0..d-1; empty means 0, 1, ..., d-1.
  std::vector<std::size_t> order;
  /// Family and trial seed for the sketches. Per-mode sketches use
  /// derive_seed(sketch.seed, mode, 0); Khatri-Rao factor dims are derived
  /// from the unfolding being sketched, so sketch.factor_dims is ignored.
  SketchSpec sketch;
  /// When false, the shifted solvers keep alpha at 0 throughout.
  bool shift_enabled = true;
};

/// One shifted power iteration: the shift used in it and the smallest
/// retained singular value Sigma(l, l) of the iterate it produced.
struct ShiftStep {
  int iteration = 0;
  double alpha = 0.0;
  double sigma_last = 0.0;
};

struct ModeShiftTrace {
  std::size_t mode = 0;
  std::vector<ShiftStep> steps;
  /// Shift after the last guarded update.
  double final_alpha = 0.0;
};

/// Indexed by mode.
struct ShiftTrace {
  std::vector<ModeShiftTrace> modes;
};

/// Work tallies in units of C_mm (m*n*p per dense product) and C_svd
/// (m*n*min(m,n) per SVD or QR).
struct CostTally {
  double mm = 0.0;
  double svd = 0.0;
};

struct SolveResult {
  TuckerFactorization factorization;
  ShiftTrace trace;
  /// Realized power iterations per mode.
  std::vector<int> power_counts;
  CostTally cost;
  /// Per-step ST residuals ||G x_k (I - U_k U_k^T)||_F^2 in processing order
  /// (ST-family solvers only).
  std::vector<double> step_residuals;
};

/// Fills defaults and validates against the tensor shape. `randomized`
/// adds the sketch-size check l_k <= min(n_k, prod_{j != k} n_j).
SolverConfig resolve_config(const Dims& dims, SolverConfig cfg, bool randomized);
std::vector<std::size_t> sketch_sizes(const SolverConfig& resolved);

TuckerFactorization thosvd(const DenseTensor& t, const std::vector<std::size_t>& ranks);
TuckerFactorization sthosvd(const DenseTensor& t, const std::vector<std::size_t>& ranks,
                            const std::vector<std::size_t>& order = {});
/// sthosvd that also reports step residuals.
SolveResult sthosvd_detailed(const DenseTensor& t, const std::vector<std::size_t>& ranks,
                             const std::vector<std::size_t>& order = {});

/// Sketch and q plain power iterations; cfg.shift_enabled is not consulted.
SolveResult rand_thosvd(const DenseTensor& t, const SolverConfig& cfg);
SolveResult rand_sthosvd(const DenseTensor& t, const SolverConfig& cfg);

/// Adaptive-shift power iterations; requires q >= 1.
SolveResult shifted_rand_thosvd(const DenseTensor& t, const SolverConfig& cfg);
SolveResult shifted_rand_sthosvd(const DenseTensor& t, const SolverConfig& cfg);

/// Orth-based compression followed by deterministic ST-HOSVD of the
/// compressed core; cfg.shift_enabled chooses shifted SVD iterations.
SolveResult holistic_rand_sthosvd(const DenseTensor& t, const SolverConfig& cfg);

/// Shifted ST solver whose per-mode iteration count is chosen by the PVE
/// rule; cfg.pve must be set.
SolveResult pve_shifted_sthosvd(const DenseTensor& t, const SolverConfig& cfg);

DenseTensor reconstruct(const TuckerFactorization& f);
double relative_error(const DenseTensor& t, const TuckerFactorization& f);

enum class Algorithm {
  Thosvd,
  Sthosvd,
  RandThosvd,
  RandSthosvd,
  ShiftedThosvd,
  ShiftedSthosvd,
  Holistic,
  HolisticShifted,
  Pve,
};

std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);
bool is_randomized(Algorithm a);

/// Dispatches to the solver for `a`. Deterministic algorithms ignore the
/// randomized fields of cfg. Pve uses cfg.pve, defaulting it when absent.
SolveResult solve(Algorithm a, const DenseTensor& t, const SolverConfig& cfg);

}  // namespace tucker
