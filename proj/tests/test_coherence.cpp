#include <gtest/gtest.h>

#include <cmath>

#include "corrcoh/coherence.hpp"
#include "corrcoh/sampling.hpp"

using namespace corrcoh;

namespace {

const double kS = 1.0 / std::sqrt(2.0);

DensityMatrix plus_state() {
  Vector v(2);
  v << kS, kS;
  return DensityMatrix(v * v.adjoint(), {2});
}

DensityMatrix bell_rho() {
  Vector v = Vector::Zero(4);
  v(0) = kS;
  v(3) = kS;
  return DensityMatrix(v * v.adjoint(), {2, 2});
}

DensityMatrix random_diagonal(int d, Rng& rng) {
  const auto w = random_simplex(static_cast<std::size_t>(d), rng);
  Matrix m = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = w[static_cast<std::size_t>(i)];
  return DensityMatrix(m, {d});
}

double binary_entropy(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

}  // namespace

TEST(L1, Examples) {
  EXPECT_NEAR(c_l1(plus_state(), Basis::computational(2)), 1.0, 1e-15);
  EXPECT_NEAR(c_l1(bell_rho(), Basis::computational(4)), 1.0, 1e-15);
  Rng rng(1);
  EXPECT_EQ(c_l1(random_diagonal(4, rng), Basis::computational(4)), 0.0);
  EXPECT_THROW(c_l1(plus_state(), Basis::computational(3)), ArgumentError);
}

TEST(RelativeEntropy, Examples) {
  EXPECT_NEAR(c_relent(plus_state(), Basis::computational(2)), 1.0, 1e-12);
  EXPECT_NEAR(c_relent(bell_rho(), Basis::computational(4)), 1.0, 1e-12);
  Rng rng(2);
  EXPECT_NEAR(c_relent(random_diagonal(3, rng), Basis::computational(3)), 0.0, 1e-14);
  EXPECT_THROW(c_relent(bell_rho(), Basis::computational(2)), ArgumentError);
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(Matrix::Identity(2, 2) / 2.0, {2})), 1.0, 1e-14);
  EXPECT_NEAR(von_neumann_entropy(bell_rho()), 0.0, 1e-12);
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 0.25;
  m(1, 1) = 0.75;
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(m, {2})), 0.811278, 1e-6);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix(m, {2})), binary_entropy(0.25), 1e-14);
}

TEST(RelativeEntropy, ClosedFormForQubit) {
  // c_relent(rho) = H2(diagonal) - H2(eigenvalues) for a qubit, eigenvalues from the Bloch radius.
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const DensityMatrix rho = ginibre_mixed({2}, rng);
    const double z = rho.matrix()(0, 0).real();
    const double r = std::sqrt((2 * z - 1) * (2 * z - 1) + 4 * std::norm(rho.matrix()(0, 1)));
    const double expected = binary_entropy(z) - binary_entropy(0.5 * (1 + r));
    EXPECT_NEAR(c_relent(rho, Basis::computational(2)), expected, 1e-10);
  }
}

class Conformance : public ::testing::TestWithParam<std::string> {};

TEST_P(Conformance, ZeroExactlyOnIncoherentStates) {
  const MeasurePtr m = measure_by_id(GetParam());
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    const int d = 2 + t % 4;
    EXPECT_NEAR(m->in_reference_basis(random_diagonal(d, rng).matrix()), 0.0, 1e-12);
    const DensityMatrix rho = ginibre_mixed({d}, rng);
    EXPECT_GT(m->in_reference_basis(rho.matrix()), 1e-8);
  }
}

TEST_P(Conformance, Convex) {
  const MeasurePtr m = measure_by_id(GetParam());
  Rng rng(8);
  for (int t = 0; t < 500; ++t) {
    const int d = 2 + t % 3;
    const DensityMatrix a = ginibre_mixed({d}, rng), b = ginibre_mixed({d}, rng);
    const double lam = rng.uniform();
    const Basis basis(haar_unitary(d, rng));
    const Matrix mix = lam * a.matrix() + (1 - lam) * b.matrix();
    EXPECT_LE(m->evaluate(mix, basis.matrix()),
              lam * m->evaluate(a, basis) + (1 - lam) * m->evaluate(b, basis) + 1e-12);
  }
}

TEST_P(Conformance, InsensitiveToPhasesAndOrder) {
  const MeasurePtr m = measure_by_id(GetParam());
  Rng rng(9);
  for (int t = 0; t < 200; ++t) {
    const int d = 2 + t % 3;
    const DensityMatrix rho = ginibre_mixed({d}, rng);
    const Matrix u = haar_unitary(d, rng);
    Matrix v = u;
    for (int c = 0; c < d; ++c) v.col(c) *= std::polar(1.0, rng.uniform(0, 6.283));
    v.col(0).swap(v.col(d - 1));
    EXPECT_NEAR(m->evaluate(rho.matrix(), u), m->evaluate(rho.matrix(), v), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Measures, Conformance, ::testing::Values("l1", "relent"));

namespace {
class HalfL1 final : public CoherenceMeasure {
 public:
  std::string_view id() const override { return "half_l1"; }
  double in_reference_basis(const Matrix& rho) const override { return 0.5 * L1Coherence{}.in_reference_basis(rho); }
};
}  // namespace

TEST(Registry, LookupAndExtension) {
  EXPECT_EQ(measure_by_id("l1")->id(), "l1");
  EXPECT_EQ(measure_by_id("relent")->id(), "relent");
  EXPECT_THROW(measure_by_id("robustness"), ArgumentError);
  register_measure(std::make_shared<HalfL1>());
  EXPECT_NEAR(measure_by_id("half_l1")->evaluate(plus_state(), Basis::computational(2)), 0.5, 1e-15);
  const auto ids = measure_ids();
  EXPECT_NE(std::find(ids.begin(), ids.end(), "half_l1"), ids.end());
}
