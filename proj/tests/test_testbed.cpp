#include "tucker/linalg.hpp"
#include "tucker/testbed.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace tucker;

namespace {

std::size_t numerical_rank(const Vector& s) {
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > 1e-12 * s(0)) ++r;
  return r;
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

ExperimentPlan small_plan() {
  ExperimentPlan plan;
  plan.recipe = parse_recipe("b-fast:n=12");
  plan.algorithms = {Algorithm::RandSthosvd, Algorithm::ShiftedSthosvd};
  for (std::size_t r : {2, 3}) {
    SolverConfig cfg;
    cfg.ranks = {r, r, r};
    cfg.oversampling = {2};
    cfg.power = 2;
    plan.configs.push_back(cfg);
  }
  plan.trials = 3;
  plan.master_seed = 77;
  return plan;
}

}  // namespace

TEST(TensorB, UnfoldingSpectraEqualDecayVector) {
  for (Decay d : {Decay::Slow, Decay::Fast, Decay::SShape}) {
    const DenseTensor t = gen_tensor_b(30, d, 12);
    const Vector v = decay_vector(30, d);
    for (std::size_t k = 0; k < 3; ++k) {
      const Vector s = singular_values(unfold(t, k));
      ASSERT_EQ(s.size(), 30);
      EXPECT_LE((s - v).cwiseAbs().maxCoeff(), 1e-10) << "mode " << k;
    }
  }
}

TEST(TensorB, DecayShapes) {
  const Vector slow = decay_vector(10, Decay::Slow);
  EXPECT_DOUBLE_EQ(slow(0) / slow(1), 4.0);
  const Vector fast = decay_vector(10, Decay::Fast);
  EXPECT_NEAR(fast(0) / fast(7), std::exp(1.0), 1e-14);
  const Vector s = decay_vector(60, Decay::SShape);
  EXPECT_NEAR(s(28), 0.001 + 0.5, 1e-15);  // midpoint at i = 29
  EXPECT_GT(s(0), 0.99);
  EXPECT_LT(s(59), 0.0011);
}

TEST(SparseSum, DenseSingleTermIsRankOne) {
  const DenseTensor t = gen_sparse_sum({6, 7, 8}, 1, 1, 1.0, 1.0, 3);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(numerical_rank(singular_values(unfold(t, k))), 1u);
  EXPECT_GT(frobenius_norm(t), 0.0);
}

TEST(SparseSum, MultilinearRankAtMostTermCount) {
  const DenseTensor t = gen_sparse_sum({10, 10, 10}, 3, 1, 10.0, 0.5, 4);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_LE(numerical_rank(singular_values(unfold(t, k))), 3u);
}

TEST(SparseSum, WeightsAreAffineInGammaOnLargeTerms) {
  // Factors do not depend on gamma, so the big-term block scales linearly.
  const auto at = [](double g) { return gen_sparse_sum({8, 8, 8}, 8, 3, g, 0.5, 9); };
  const DenseTensor t1 = at(1.0), t2 = at(2.0), t5 = at(5.0);
  for (std::size_t i = 0; i < t1.size(); ++i) {
    const double big = t2.data()[i] - t1.data()[i];
    EXPECT_NEAR(t5.data()[i], t1.data()[i] + 4.0 * big, 1e-12);
  }
  // gamma = 1 makes every weight 1/i regardless of how many terms are big.
  const DenseTensor none = gen_sparse_sum({8, 8, 8}, 8, 0, 123.0, 0.5, 9);
  EXPECT_EQ(gen_tensor_a(8, 8, 1.0, 0.5, 9), none);
}

TEST(SparseSum, SparsityControlsSupport) {
  // One term with ceil(0.25 * 8) = 2 nonzeros per factor: 8 nonzero entries.
  const DenseTensor t = gen_sparse_sum({8, 8, 8}, 1, 0, 1.0, 0.25, 5);
  const auto nnz = std::count_if(t.values().begin(), t.values().end(), [](double v) { return v != 0.0; });
  EXPECT_EQ(nnz, 8);
  EXPECT_THROW(gen_sparse_sum({8, 8, 8}, 1, 0, 1.0, 0.0, 5), std::invalid_argument);
  EXPECT_THROW(gen_sparse_sum({8, 8}, 1, 0, 1.0, 0.5, 5), std::invalid_argument);
  EXPECT_THROW(gen_sparse_sum({8, 8, 8}, 1, 2, 1.0, 0.5, 5), std::invalid_argument);
}

TEST(SparseSum, TensorCShapesAndDeterminism) {
  const DenseTensor c = gen_tensor_c({20, 25, 30}, 6);
  EXPECT_EQ(c.dims(), (Dims{20, 25, 30}));
  EXPECT_EQ(c, gen_tensor_c({20, 25, 30}, 6));
  EXPECT_NE(c, gen_tensor_c({20, 25, 30}, 7));
  EXPECT_EQ(gen_tensor_a(15, 5, 100.0, 0.2, 1), gen_tensor_a(15, 5, 100.0, 0.2, 1));
}

TEST(ExactRank, HasPrescribedMultilinearRank) {
  const DenseTensor t = gen_exact_rank({12, 10, 9}, {3, 4, 2}, 5);
  EXPECT_EQ(numerical_rank(singular_values(unfold(t, 0))), 3u);
  EXPECT_EQ(numerical_rank(singular_values(unfold(t, 1))), 4u);
  EXPECT_EQ(numerical_rank(singular_values(unfold(t, 2))), 2u);
  EXPECT_THROW(gen_exact_rank({3, 3}, {4, 1}, 1), std::invalid_argument);
}

TEST(Recipe, ParseAndCanonicalRoundTrip) {
  const Recipe a = parse_recipe("a:n=40,big=10,gamma=100,sparsity=0.1");
  EXPECT_EQ(a.kind, "a");
  EXPECT_EQ(a.n, 40u);
  EXPECT_EQ(a.big, 10u);
  EXPECT_DOUBLE_EQ(a.gamma, 100.0);
  const std::string canon = to_string(a);
  EXPECT_EQ(canon.find(','), std::string::npos);
  EXPECT_EQ(to_string(parse_recipe(canon)), canon);

  const Recipe c = parse_recipe("c");
  EXPECT_EQ(c.dims, (Dims{60, 70, 80}));
  const Recipe e = parse_recipe("exact:dims=5x6x7;ranks=2x2x3");
  EXPECT_EQ(generate(e, 1).dims(), (Dims{5, 6, 7}));
  EXPECT_EQ(to_string(parse_recipe(to_string(e))), to_string(e));

  EXPECT_THROW(parse_recipe("d:n=3"), std::invalid_argument);
  EXPECT_THROW(parse_recipe("a:n"), std::invalid_argument);
  EXPECT_THROW(parse_recipe("a:n=x"), std::invalid_argument);
  EXPECT_THROW(parse_recipe("a:size=3"), std::invalid_argument);
  EXPECT_THROW(generate(parse_recipe("exact"), 1), std::invalid_argument);
}

TEST(Experiment, CellsAreOrderedAndSeedsShared) {
  const ExperimentPlan plan = small_plan();
  const auto reports = run_experiment(plan);
  ASSERT_EQ(reports.size(), 12u);
  for (const auto& r : reports) {
    EXPECT_TRUE(r.ok) << r.error;
    EXPECT_EQ(r.seed, trial_seed(plan.master_seed, r.config_index, r.trial));
    EXPECT_EQ(r.config.sketch.seed, r.seed);
    EXPECT_GT(r.re, 0.0);
    EXPECT_LT(r.re, 1.0);
  }
  EXPECT_EQ(reports[0].config_index, 0u);
  EXPECT_EQ(reports[3].algorithm, Algorithm::ShiftedSthosvd);
  EXPECT_EQ(reports[6].config_index, 1u);
  // Paired seeds: both algorithms see the same sketch stream in each trial.
  EXPECT_EQ(reports[0].seed, reports[3].seed);
}

TEST(Experiment, ParallelAndSerialCellsAgree) {
  ExperimentPlan plan = small_plan();
  const auto par = run_experiment(plan);
  plan.parallel_cells = false;
  const auto ser = run_experiment(plan);
  ASSERT_EQ(par.size(), ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) EXPECT_EQ(par[i].re, ser[i].re);
}

TEST(Experiment, FailedCellReportsNan) {
  ExperimentPlan plan = small_plan();
  plan.configs[1].ranks = {20, 20, 20};
  const auto reports = run_experiment(plan);
  std::size_t failed = 0;
  for (const auto& r : reports)
    if (!r.ok) {
      ++failed;
      EXPECT_TRUE(std::isnan(r.re));
      EXPECT_FALSE(r.error.empty());
    }
  EXPECT_EQ(failed, 6u);
  std::ostringstream csv;
  write_csv(csv, reports, to_string(plan.recipe), false);
  EXPECT_NE(csv.str().find(",nan,"), std::string::npos);
}

TEST(Experiment, AggregateIsOrderInvariant) {
  auto reports = run_experiment(small_plan());
  const auto before = aggregate(reports);
  std::mt19937 shuffle_rng(3);
  std::shuffle(reports.begin(), reports.end(), shuffle_rng);
  const auto after = aggregate(reports);
  ASSERT_EQ(before.size(), 4u);
  ASSERT_EQ(after.size(), before.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(before[i].algorithm, after[i].algorithm);
    EXPECT_EQ(before[i].runs, 3u);
    EXPECT_EQ(before[i].mean_re, after[i].mean_re);
    EXPECT_EQ(before[i].median_re, after[i].median_re);
  }
}

TEST(Csv, RowCountHeaderAndDeterminism) {
  const ExperimentPlan plan = small_plan();
  std::ostringstream a, b;
  write_csv(a, run_experiment(plan), to_string(plan.recipe), false);
  write_csv(b, run_experiment(plan), to_string(plan.recipe), false);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(count_lines(a.str()), 13u);
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "algorithm,recipe,r,s,q,trial,seed,re,seconds,alpha_final");
  // Every row has 10 fields.
  std::istringstream rows(a.str());
  std::string line;
  while (std::getline(rows, line)) EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9);
}

TEST(Csv, DeterministicAlgorithmsLeaveSketchColumnsEmpty) {
  ExperimentPlan plan = small_plan();
  plan.algorithms = {Algorithm::Thosvd, Algorithm::Pve};
  plan.configs.resize(1);
  plan.trials = 1;
  std::ostringstream out;
  write_csv(out, run_experiment(plan), "b-fast:n=12", false);
  std::istringstream rows(out.str());
  std::string header, det, pve;
  std::getline(rows, header);
  std::getline(rows, det);
  std::getline(rows, pve);
  EXPECT_EQ(det.substr(0, det.find(",0,")), "thosvd,b-fast:n=12,2;2;2,,");
  EXPECT_EQ(pve.rfind("pve,b-fast:n=12,2;2;2,2,", 0), 0u);
  EXPECT_NE(pve.find(';', pve.find(",2,") + 3), std::string::npos);
}

TEST(Median, EvenOddEmpty) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_TRUE(std::isnan(median({})));
}
