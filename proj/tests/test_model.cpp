#include <cmath>

#include <gtest/gtest.h>

#include "obsdict/errors.hpp"
#include "obsdict/model.hpp"
#include "support/generators.hpp"

namespace obsdict {
namespace {

using testing::Gen;

double rel(const Matrix& x, const Matrix& ref) { return spectral_norm(x - ref) / spectral_norm(ref); }

TEST(MatrixExponentialTest, ZeroGeneratorGivesIdentity) {
  const Matrix e = matrix_exponential(Matrix::Zero(2, 2), 7.0);
  EXPECT_EQ(e, Matrix::Identity(2, 2));
}

TEST(MatrixExponentialTest, NilpotentSeriesTerminates) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  Matrix expected(2, 2);
  expected << 1.0, 1.0, 0.0, 1.0;
  EXPECT_LE(spectral_norm(matrix_exponential(a, 1.0) - expected), 1e-15);
}

TEST(MatrixExponentialTest, ScalarLog2) {
  Matrix a = Matrix::Identity(2, 2) * std::log(2.0);
  EXPECT_LE(spectral_norm(matrix_exponential(a, 1.0) - 2.0 * Matrix::Identity(2, 2)), 2e-12);
}

TEST(MatrixExponentialTest, MatchesRk4OracleUpToNormThirty) {
  Gen gen(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = gen.integer(1, 5);
    const double norm = gen.uniform(0.1, 30.0);
    // Skew-Hermitian keeps ||e^{A}|| = 1 so the oracle stays well scaled.
    Matrix h = gen.scaled(n, 1.0);
    h = (h - h.adjoint()) * 0.5;
    const Matrix a = h * (norm / std::max(spectral_norm(h), 1e-300));
    const Matrix e = matrix_exponential(a, 1.0);
    EXPECT_LE(rel(e, testing::expm_rk4(a, 1.0, 20000)), 1e-12) << "norm " << norm;
  }
}

TEST(MatrixExponentialTest, GroupProperty) {
  Gen gen(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = gen.integer(1, 6);
    const double s = gen.uniform(-3.0, 3.0), t = gen.uniform(-3.0, 3.0);
    const double budget = 10.0 / std::max(std::abs(s + t), 0.1);
    const Matrix a = gen.scaled(n, gen.uniform(0.0, std::min(budget, 3.0)));
    const Matrix lhs = matrix_exponential(a, s) * matrix_exponential(a, t);
    const Matrix rhs = matrix_exponential(a, s + t);
    EXPECT_LE(spectral_norm(lhs - rhs), 1e-10 * spectral_norm(rhs));
  }
}

TEST(MatrixExponentialTest, DiagonalizableAgreesWithEigenForm) {
  Gen gen(13);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = gen.integer(1, 6);
    const Matrix a = gen.scaled(n, gen.uniform(0.1, 4.0));
    const DiagonalizableSystem d = spectral_decomposition(a);
    const Matrix v = d.basis_or_identity();
    Matrix et = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) et(i, i) = std::exp(1.3 * d.spectrum().mu()[i]);
    const Matrix ref = v * et * v.inverse();
    EXPECT_LE(rel(matrix_exponential(a, 1.3), ref), 1e-9);
  }
}

TEST(MatrixExponentialTest, RejectsNonFiniteInput) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = std::nan("");
  EXPECT_THROW(matrix_exponential(a, 1.0), NonFiniteError);
  EXPECT_THROW(matrix_exponential(Matrix::Identity(2, 2), std::nan("")), NonFiniteError);
}

TEST(MatrixExponentialTest, OverflowIsReported) {
  EXPECT_THROW(matrix_exponential(Matrix::Identity(2, 2) * 1000.0, 1.0), OverflowError);
}

TEST(OperatorPowerTest, ZeroPowerIsIdentity) {
  Gen gen(21);
  EXPECT_EQ(operator_power(gen.matrix(3, 3), 0), Matrix::Identity(3, 3));
}

TEST(OperatorPowerTest, DiagonalHalfCubed) {
  const Matrix p = operator_power(Matrix::Identity(1, 1) * 0.5, 3);
  EXPECT_EQ(p(0, 0), Complex(0.125, 0.0));
}

TEST(OperatorPowerTest, MatchesNaiveProduct) {
  Gen gen(22);
  const Matrix a = gen.matrix(3, 3);
  Matrix naive = Matrix::Identity(3, 3);
  for (int i = 0; i < 5; ++i) naive = naive * a;
  EXPECT_LE(spectral_norm(operator_power(a, 5) - naive), 1e-13 * spectral_norm(naive));
}

TEST(SpectralDecompositionTest, DiagonalInput) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 0.5;
  a(1, 1) = -0.25;
  const DiagonalizableSystem d = spectral_decomposition(a);
  std::vector<Complex> mu = d.spectrum().mu();
  std::sort(mu.begin(), mu.end(), [](Complex x, Complex y) { return x.real() < y.real(); });
  EXPECT_NEAR(std::abs(mu[0] - Complex(-0.25)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(mu[1] - Complex(0.5)), 0.0, 1e-15);
  const std::vector<Complex> lv = d.spectrum().lambda_view();
  for (std::size_t i = 0; i < lv.size(); ++i) EXPECT_EQ(lv[i], -d.spectrum().mu()[i]);
  // Basis is the identity up to column scaling and order.
  const Matrix v = d.basis_or_identity();
  EXPECT_NEAR((v.cwiseAbs() - v.cwiseAbs().cwiseMin(1.0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(d.basis_condition(), 1.0, 1e-12);
}

TEST(SpectralDecompositionTest, JordanBlockIsRejected) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  try {
    spectral_decomposition(a);
    FAIL() << "expected NotDiagonalizableError";
  } catch (const NotDiagonalizableError& e) {
    EXPECT_GT(e.condition_number(), 1e8);
  }
}

TEST(SpectralDecompositionTest, RecoversConjugatedSpectrum) {
  Gen gen(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix p = gen.matrix(2, 2) + 2.0 * Matrix::Identity(2, 2);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 0.3;
    d(1, 1) = 0.6;
    const DiagonalizableSystem s = spectral_decomposition(p * d * p.inverse());
    std::vector<double> re;
    for (Complex z : s.spectrum().mu()) re.push_back(z.real());
    std::sort(re.begin(), re.end());
    EXPECT_NEAR(re[0], 0.3, 1e-10);
    EXPECT_NEAR(re[1], 0.6, 1e-10);
    EXPECT_LE(spectral_norm(s.dense() - p * d * p.inverse()), 1e-8 * spectral_norm(p * d * p.inverse()));
  }
}

TEST(StabilityTest, ExponentialStability) {
  const StabilityInfo s = stability_classification(Spectrum({-1.0, -2.0}));
  EXPECT_TRUE(s.exponentially_stable);
  EXPECT_DOUBLE_EQ(s.omega, -1.0);
}

TEST(StabilityTest, StrongStability) {
  const StabilityInfo s = stability_classification(Spectrum({0.5, 0.9}));
  EXPECT_TRUE(s.strongly_stable);
  EXPECT_DOUBLE_EQ(s.spectral_radius, 0.9);
  EXPECT_FALSE(stability_classification(Spectrum({0.5, 1.0})).strongly_stable);
}

TEST(StabilityTest, MatrixOverloadAgrees) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = -1.0;
  a(1, 1) = -2.0;
  const StabilityInfo s = stability_classification(a);
  EXPECT_TRUE(s.exponentially_stable);
  EXPECT_NEAR(s.omega, -1.0, 1e-14);
}

TEST(SpectrumTest, SignConventionRoundTripIsExact) {
  Gen gen(41);
  std::vector<Complex> mu;
  for (int i = 0; i < 20; ++i) mu.push_back(gen.cnormal());
  const Spectrum s(mu);
  EXPECT_EQ(Spectrum::from_lambda(s.lambda_view()).mu(), mu);
}

TEST(ObservationOperatorTest, RoundTripIsBitExact) {
  Gen gen(42);
  const std::vector<Vector> vs{gen.vector(3), gen.vector(3)};
  const SamplingFamily f(vs, {"left", "right"});
  const SamplingFamily back = ObservationOperator::from_family(f).to_family(f.labels());
  ASSERT_EQ(back.size(), f.size());
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(back.vectors()[i], f.vectors()[i]);
  EXPECT_EQ(back.labels(), f.labels());
}

TEST(TypeInvariantsTest, ConstructionRejectsBadInput) {
  EXPECT_THROW(Operator(Matrix(2, 3)), Error);
  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 0) = Complex(INFINITY, 0);
  EXPECT_THROW(Operator{bad}, NonFiniteError);
  EXPECT_THROW(Spectrum({Complex(std::nan(""), 0)}), NonFiniteError);
  EXPECT_THROW(SamplingFamily(std::vector<Vector>{}), Error);
  EXPECT_THROW(SamplingFamily({testing::vec({1.0}), testing::vec({1.0, 2.0})}), DimensionMismatchError);
  EXPECT_THROW(validate_time_domain(DiscreteFinite{-1}), Error);
  EXPECT_THROW(validate_time_domain(ContinuousFinite{0.0, 8, 8}), Error);
  EXPECT_THROW(SystemSpec(Operator::identity(3), SamplingFamily({testing::vec({1.0, 0.0})}), DiscreteFinite{1}),
               DimensionMismatchError);
}

TEST(SingularValuesTest, RankCountsWithDefaultAndCustomTolerance) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 1.0;
  m(1, 1) = 1e-20;
  EXPECT_EQ(numerical_rank(m), 1);
  EXPECT_EQ(numerical_rank(m, 1e-25), 2);
}

TEST(LogNormTest, HermitianPart) {
  Matrix a(2, 2);
  a << -1.0, 4.0, 0.0, -1.0;
  EXPECT_NEAR(log_norm(a), 1.0, 1e-12);
}

}  // namespace
}  // namespace obsdict
