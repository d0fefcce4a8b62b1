#pragma once

// Probabilistic error bounds for the randomized (optionally shifted) T- and
// ST-HOSVD solvers, the deterministic HOSVD tail bound, and the Gaussian
// extreme-singular-value probability floors they rest on.

#include "tucker/solvers.hpp"
#include "tucker/tensor.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace tucker {

/// The bound's hypotheses (0 < sum of failure probabilities < 1, l_k <= n_k' - r_k)
/// do not hold for the given parameters.
class BoundHypothesisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// P(sigma_max(Omega) <= sqrt(2n) gamma) lower bound for an l x n standard
/// Gaussian Omega with l < n. Throws std::domain_error if the expression is negative.
double gaussian_largest_sv_floor(std::size_t n, double gamma);
/// P(sigma_min(Omega) >= 1 / (sqrt(n) beta)) lower bound for an l x n
/// standard Gaussian Omega with l <= n.
double gaussian_smallest_sv_floor(std::size_t n, std::size_t l, double beta);

struct BoundParams {
  Dims dims;
  std::vector<std::size_t> ranks;
  std::vector<std::size_t> sketch;  // l_k
  std::vector<std::size_t> j;       // analysis index j_k, 1 <= j_k <= r_k
  std::vector<double> beta;
  std::vector<double> gamma;
  /// Processing order (ST bound only); empty means identity.
  std::vector<std::size_t> order;
  /// Descending singular values of A_(k), one vector per mode.
  std::vector<Vector> spectra;
  /// Shifts alpha_t used in each power iteration, per mode. Empty inner
  /// vectors mean q = 0.
  std::vector<std::vector<double>> shifts;
};

/// Fills j = max(1, r-1), beta = gamma = 2 where the caller left them empty.
BoundParams with_default_knobs(BoundParams p);

/// Builds params from a tensor, a resolved config and a solver trace. Shift
/// lists come from the trace; modes without recorded steps get q zeros
/// (unshifted power iterations).
BoundParams bound_params_for(const DenseTensor& t, const SolverConfig& resolved, const ShiftTrace& trace);

/// Failure probability of mode k for the T-HOSVD bound (columns of the
/// unfolding: prod_{j != k} n_j).
double phi_k(const BoundParams& p, std::size_t k);
/// Same expression with r_{<k} n_{>k} columns, "<" and ">" taken in
/// processing order.
double psi_k(const BoundParams& p, std::size_t k);

struct BoundReport {
  double value = 0.0;
  /// Sum of the per-mode failure probabilities.
  double failure = 0.0;
  double probability_floor = 1.0;
  std::vector<double> per_mode;
  bool hypotheses_hold = true;
  std::string violation;
};

/// Randomized (shifted) T-HOSVD bound on ||A - A_hat||_F. Throws
/// BoundHypothesisError when the hypotheses fail.
BoundReport thosvd_error_bound(const BoundParams& p);
/// Rough randomized (shifted) ST-HOSVD bound on ||A - A_hat||_F.
BoundReport sthosvd_error_bound(const BoundParams& p);
/// The same formulas without the hypothesis gate; the report says whether
/// the hypotheses hold.
BoundReport evaluate_thosvd_bound(const BoundParams& p);
BoundReport evaluate_sthosvd_bound(const BoundParams& p);
/// Deterministic HOSVD bound sqrt(sum_k sum_{i > r_k} sigma_i(A_(k))^2);
/// holds for both T- and ST-HOSVD.
BoundReport deterministic_error_bound(const std::vector<Vector>& spectra, const std::vector<std::size_t>& ranks);

/// Singular values of every mode unfolding.
std::vector<Vector> unfolding_spectra(const DenseTensor& t);

}  // namespace tucker
