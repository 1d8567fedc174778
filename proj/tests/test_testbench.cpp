#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "corrcoh/json_io.hpp"
#include "corrcoh/testbench.hpp"

using namespace corrcoh;

namespace {

const L1Coherence kL1;
const RelativeEntropyCoherence kRel;

// Prefix-sum check written out directly on sorted copies.
bool prefix_dominates(std::vector<double> hi, std::vector<double> lo) {
  std::sort(hi.rbegin(), hi.rend());
  std::sort(lo.rbegin(), lo.rend());
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < hi.size(); ++i) {
    a += hi[i];
    b += lo[i];
    if (a < b - 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST(Majorization, Examples) {
  const MajorizationPair ok({0.5, 0.5}, {0.9, 0.1});
  EXPECT_EQ(ok.target()[0], 0.9);
  EXPECT_THROW(MajorizationPair({0.6, 0.4}, {0.5, 0.5}), ValidationError);
  EXPECT_THROW(MajorizationPair({0.6, 0.6}, {1.2, 0.0}), ValidationError);
  EXPECT_TRUE(majorizes({1.0, 0.0, 0.0}, {0.5, 0.3, 0.2}));
  EXPECT_TRUE(majorizes({0.4, 0.4, 0.2}, {0.4, 0.4, 0.2}));
  EXPECT_FALSE(majorizes({0.4, 0.3, 0.3}, {0.5, 0.3, 0.2}));
  // Vectors of unequal length are padded with zeros.
  EXPECT_TRUE(majorizes({1.0}, {0.5, 0.5}));
}

TEST(Majorization, SamplerProducesValidPairs) {
  int identical = 0;
  for (int t = 0; t < 2000; ++t) {
    const int d = 2 + t % 3;
    const MajorizationPair p = nielsen_pair_sampler({d, d}, static_cast<std::uint64_t>(t));
    ASSERT_EQ(p.source().size(), static_cast<std::size_t>(d));
    EXPECT_TRUE(prefix_dominates(p.target(), p.source()));
    EXPECT_NEAR(std::accumulate(p.source().begin(), p.source().end(), 0.0), 1.0, 1e-12);
    EXPECT_TRUE(std::is_sorted(p.source().rbegin(), p.source().rend()));
    if (p.source() == p.target()) ++identical;
  }
  EXPECT_GT(identical, 0);
  EXPECT_THROW(nielsen_pair_sampler({2, 3}, 1), ArgumentError);
  EXPECT_THROW(nielsen_pair_sampler({5, 5}, 1), ArgumentError);
  const MajorizationPair a = nielsen_pair_sampler({3, 3}, 99), b = nielsen_pair_sampler({3, 3}, 99);
  EXPECT_EQ(a.source(), b.source());
}

TEST(Families, Werner) {
  const DensityMatrix w = werner_state(0.4);
  EXPECT_NEAR(w.matrix()(0, 0).real(), 0.4 / 2 + 0.6 / 4, 1e-15);
  EXPECT_NEAR(w.matrix()(0, 3).real(), 0.2, 1e-15);
  EXPECT_NEAR(w.matrix()(1, 1).real(), 0.15, 1e-15);
  EXPECT_THROW(werner_state(1.5), ArgumentError);
}

TEST(Families, PureFromSchmidt) {
  RealVector l(3);
  l << 0.6, 0.3, 0.1;
  Rng rng(2);
  const Ket psi = pure_from_schmidt(l, haar_unitary(3, rng), haar_unitary(3, rng));
  const SchmidtForm sf = schmidt_decompose(psi);
  EXPECT_LT((sf.coefficients - l).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SeparableFit, WernerResidual) {
  for (double p : {0.0, 0.2, 1.0 / 3.0}) {
    const DensityMatrix w = werner_state(p);
    const DecompositionFit fit = find_separable_decomposition(w, 6, 3);
    EXPECT_TRUE(fit.accepted) << p;
    EXPECT_LE(fit.residual, 1e-7) << p;
    // Independent reconstruction from the returned members.
    Matrix m = Matrix::Zero(4, 4);
    for (std::size_t k = 0; k < fit.decomposition.states.size(); ++k) {
      EXPECT_GE(schmidt_decompose(fit.decomposition.states[k]).coefficients(0), 1.0 - 1e-10);
      m += fit.decomposition.weights[k] * fit.decomposition.states[k].projector();
    }
    EXPECT_LE(max_abs(m - w.matrix()), 1e-7);
  }
  EXPECT_FALSE(find_separable_decomposition(werner_state(0.6), 6, 3).accepted);
}

TEST(Perturbation, KeepsTraceAndOrder) {
  RealVector l(4);
  l << 0.25, 0.25, 0.25, 0.25;
  for (double eps : perturbation_sequence()) {
    const RealVector p = perturb_spectrum(l, eps);
    EXPECT_NEAR(p.sum(), 1.0, 1e-15);
    for (int i = 0; i + 1 < 4; ++i) EXPECT_NEAR(p(i) - p(i + 1), eps, 1e-15);
  }
  RealVector m(3);
  m << 0.5, 0.25, 0.25;
  const RealVector q = perturb_spectrum(m, 1e-3);
  EXPECT_EQ(q(0), 0.5);
  EXPECT_NEAR(q(1), 0.2505, 1e-15);
  EXPECT_NEAR(q(2), 0.2495, 1e-15);
  EXPECT_EQ(perturbation_sequence(), (std::vector<double>{1e-2, 1e-3, 1e-4}));
}

TEST(Convexity, BellAndProductExample) {
  // 0.5 Bell + 0.5 |00>: the bound through this decomposition is the average 0.5.
  Vector z = Vector::Zero(4);
  z(0) = 1.0;
  Ensemble e{{0.5, 0.5}, {bell_state(), Ket(z, {2, 2})}};
  ExtensionOptions o;
  o.decomposition = e;
  o.search = false;
  const BoundReport r = e_upper_bound(kL1, e.mixture(), o);
  EXPECT_LE(r.value, 0.5 + 1e-9);
  EXPECT_GE(r.value, 0.5 * concurrence_2q(e.mixture()) - 1e-9);
}

TEST(Suites, SmallRunsPass) {
  for (const std::string& id : suite_ids())
    for (const CoherenceMeasure* m : {static_cast<const CoherenceMeasure*>(&kL1), static_cast<const CoherenceMeasure*>(&kRel)}) {
      const int n = id == "degenerate_schmidt" ? 6 : 12;
      const PropertySuiteReport r = run_suite(id, *m, n, 42);
      EXPECT_TRUE(r.passed()) << id << "/" << m->id() << ": " << (r.failures.empty() ? "" : r.failures.front().check.name);
      EXPECT_GE(r.trials, n);
      EXPECT_GT(r.checks, r.trials - 1);
    }
  EXPECT_THROW(run_suite("convexity", kL1, 0, 1), ArgumentError);
  EXPECT_THROW(run_suite("nonexistent", kL1, 5, 1), ArgumentError);
}

TEST(Suites, FaithfulnessIncludesWernerScan) {
  const PropertySuiteReport r = suite_faithfulness(kL1, 4, 1);
  EXPECT_EQ(r.trials, 4 + static_cast<int>(werner_scan_points().size()));
  EXPECT_EQ(werner_scan_points().size(), 22u);
  EXPECT_TRUE(r.passed());
}

TEST(Suites, DeterministicReports) {
  const PropertySuiteReport a = suite_monotonicity_pure(kRel, 30, 7), b = suite_monotonicity_pure(kRel, 30, 7);
  EXPECT_EQ(io::dump(io::to_json(a)), io::dump(io::to_json(b)));
  const PropertySuiteReport c = suite_monotonicity_pure(kRel, 30, 8);
  EXPECT_EQ(c.seed, 8u);
  EXPECT_NE(suite_seed(42, "convexity"), suite_seed(42, "monotonicity"));
  EXPECT_EQ(suite_seed(42, "convexity"), suite_seed(42, "convexity"));
}

TEST(Suites, ReplayReproducesTrial) {
  const std::uint64_t s = trial_seed(123, 5);
  const TrialOutcome original = convexity_trial(kL1, 5, s);
  ASSERT_FALSE(original.checks.empty());
  const FailureRecord f{5, s, original.inputs, original.checks.front()};
  const TrialOutcome again = replay("convexity", kL1, 10, f);
  EXPECT_EQ(again.inputs, original.inputs);
  ASSERT_EQ(again.checks.size(), original.checks.size());
  for (std::size_t i = 0; i < again.checks.size(); ++i) EXPECT_EQ(again.checks[i].observed, original.checks[i].observed);
}
