#include <algorithm>
#include <vector>

#include <gtest/gtest.h>
#include <Eigen/Eigenvalues>

#include "gfsub/error.hpp"
#include "gfsub/graph.hpp"
#include "gfsub/subspace.hpp"
#include "test_util.hpp"

namespace gfsub {
namespace {

using testing::max_abs;
using testing::off_diagonal_max;
using testing::Rng;

GraphSpectrum random_spectrum(Rng& rng, Eigen::Index n) {
  return spectrum(ConnectivityGraph(rng.random_adjacency(n)));
}

SpectralTrial spectral(Matrix coeffs, Label label, std::size_t id = 0) {
  SpectralTrial st;
  st.band = resolve_band(BandMode::All, 0, static_cast<std::size_t>(coeffs.rows()));
  st.coeffs = std::move(coeffs);
  st.label = label;
  st.trial_id = id;
  return st;
}

TEST(NormalizeTrial, SecondEigenvectorMapsToSecondBasisVector) {
  Rng rng(41);
  const auto spec = random_spectrum(rng, 8);
  TrialMatrix trial;
  trial.data = spec.eigenvectors.col(1) * Eigen::RowVectorXd::LinSpaced(5, 1.0, 5.0);
  trial.label = Label::Class1;
  const auto st = normalize_trial(trial, spec);
  Matrix expected = Matrix::Zero(8, 5);
  expected.row(1).setOnes();
  EXPECT_LE(max_abs(st.coeffs - expected), 1e-12);
  EXPECT_EQ(st.band.first, 1u);
  EXPECT_EQ(st.band.last, 8u);
}

TEST(NormalizeTrial, ColumnsAreUnitWithZeroFirstCoefficient) {
  Rng rng(42);
  const auto spec = random_spectrum(rng, 12);
  TrialMatrix trial{rng.normal_matrix(12, 40), Label::Class2, 7, Split::Train};
  const auto st = normalize_trial(trial, spec);
  for (Eigen::Index t = 0; t < 40; ++t) {
    EXPECT_NEAR(st.coeffs.col(t).norm(), 1.0, 1e-12);
    EXPECT_LE(std::abs(st.coeffs(0, t)), 1e-12);
  }
  EXPECT_EQ(st.trial_id, 7u);
  EXPECT_EQ(st.label, Label::Class2);
}

TEST(NormalizeTrial, ScaleInvariant) {
  Rng rng(43);
  const auto spec = random_spectrum(rng, 10);
  TrialMatrix trial{rng.normal_matrix(10, 30), Label::Class1, 0, Split::Train};
  TrialMatrix scaled = trial;
  scaled.data *= 3.7;
  EXPECT_LE(max_abs(normalize_trial(trial, spec).coeffs - normalize_trial(scaled, spec).coeffs),
            1e-12);
}

TEST(NormalizeTrial, ColumnAlongFirstEigenvectorIsDegenerate) {
  Rng rng(44);
  const auto spec = random_spectrum(rng, 6);
  TrialMatrix trial{rng.normal_matrix(6, 4), Label::Class1, 3, Split::Train};
  trial.data.col(2) = 2.5 * spec.eigenvectors.col(0);
  try {
    normalize_trial(trial, spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateColumn);
    EXPECT_EQ(e.indices().at(0), 2u);
  }
}

TEST(NormalizeTrial, ChannelCountMustMatch) {
  Rng rng(45);
  const auto spec = random_spectrum(rng, 6);
  TrialMatrix trial{rng.normal_matrix(5, 4), Label::Class1, 0, Split::Train};
  EXPECT_THROW(normalize_trial(trial, spec), Error);
}

TEST(TruncateBand, KeepsRowsWithoutRenormalizing) {
  Rng rng(46);
  const auto st = spectral(rng.normal_matrix(9, 4), Label::Class1);
  SpectralBand band = resolve_band(BandMode::ThirdsMid, 0, 9);
  const auto cut = truncate_band(st, band);
  EXPECT_EQ(cut.coeffs, st.coeffs.middleRows(3, 3));
  EXPECT_EQ(cut.band, band);
  const auto inner = truncate_band(cut, SpectralBand{BandMode::All, 0, 5, 6});
  EXPECT_EQ(inner.coeffs, st.coeffs.middleRows(4, 2));
  EXPECT_THROW(truncate_band(cut, SpectralBand{BandMode::All, 0, 2, 5}), Error);
}

TEST(ClassCovariances, RankOneTrialGivesBasisProjector) {
  Matrix c = Matrix::Zero(4, 6);
  c.row(2) << 1, -2, 0.5, 3, -1, 2;
  Matrix d = Matrix::Zero(4, 6);
  d.row(0).setConstant(0.3);
  const std::vector<SpectralTrial> trials{spectral(c, Label::Class1), spectral(d, Label::Class2)};
  const auto cov = class_covariances(trials);
  Matrix e2 = Matrix::Zero(4, 4);
  e2(2, 2) = 1.0;
  Matrix e0 = Matrix::Zero(4, 4);
  e0(0, 0) = 1.0;
  EXPECT_LE(max_abs(cov.s1 - e2), 1e-15);
  EXPECT_LE(max_abs(cov.s2 - e0), 1e-15);
}

TEST(ClassCovariances, MeanOfTraceNormalizedScatter) {
  Rng rng(47);
  std::vector<SpectralTrial> trials;
  for (std::size_t i = 0; i < 6; ++i) {
    trials.push_back(spectral(rng.normal_matrix(5, 20), i % 2 ? Label::Class2 : Label::Class1, i));
  }
  trials.push_back(spectral(rng.normal_matrix(5, 20), Label::Unlabeled, 99));
  const auto cov = class_covariances(trials);
  EXPECT_EQ(cov.k1, 3u);
  EXPECT_EQ(cov.k2, 3u);
  Matrix s1 = Matrix::Zero(5, 5);
  for (std::size_t i = 0; i < 6; i += 2) {
    const Matrix s = trials[i].coeffs * trials[i].coeffs.transpose();
    s1 += s / s.trace() / 3.0;
  }
  EXPECT_LE(max_abs(cov.s1 - s1), 1e-14);
  EXPECT_NEAR(cov.s1.trace(), 1.0, 1e-14);
  EXPECT_NEAR(cov.s2.trace(), 1.0, 1e-14);

  // Order of trials and duplication of the whole list do not matter.
  std::vector<SpectralTrial> shuffled(trials.rbegin(), trials.rend());
  shuffled.insert(shuffled.end(), trials.begin(), trials.end());
  const auto again = class_covariances(shuffled);
  EXPECT_LE(max_abs(again.s1 - cov.s1), 1e-14);
  EXPECT_LE(max_abs(again.s2 - cov.s2), 1e-14);
}

TEST(ClassCovariances, Errors) {
  Rng rng(48);
  const std::vector<SpectralTrial> one{spectral(rng.normal_matrix(3, 4), Label::Class1)};
  try {
    class_covariances(one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingClass);
  }
  const std::vector<SpectralTrial> zero{spectral(Matrix::Zero(3, 4), Label::Class1),
                                        spectral(rng.normal_matrix(3, 4), Label::Class2)};
  try {
    class_covariances(zero);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TraceUnderflow);
  }
  const std::vector<SpectralTrial> mixed{spectral(rng.normal_matrix(3, 4), Label::Class1),
                                         spectral(rng.normal_matrix(4, 4), Label::Class2)};
  try {
    class_covariances(mixed);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(SimultaneousDiagonalize, DiagonalPair) {
  ClassCovariancePair cov;
  cov.s1 = Eigen::Vector2d(0.7, 0.3).asDiagonal();
  cov.s2 = Eigen::Vector2d(0.3, 0.7).asDiagonal();
  const auto proj = simultaneous_diagonalize(cov);
  EXPECT_NEAR(proj.theta1(0), 0.7, 1e-12);
  EXPECT_NEAR(proj.theta1(1), 0.3, 1e-12);
  EXPECT_LE(max_abs(proj.p_hat - Matrix::Identity(2, 2)), 1e-12);
}

TEST(SimultaneousDiagonalize, EqualClassesGiveOneHalf) {
  Rng rng(49);
  ClassCovariancePair cov;
  cov.s1 = rng.random_spd_trace_one(6);
  cov.s2 = cov.s1;
  const auto proj = simultaneous_diagonalize(cov);
  EXPECT_LE((proj.theta1.array() - 0.5).abs().maxCoeff(), 1e-12);
}

TEST(SimultaneousDiagonalize, DiagonalizesBothAndMatchesGeneralizedEigenproblem) {
  Rng rng(50);
  for (Eigen::Index n : {2, 3, 5, 9, 17}) {
    ClassCovariancePair cov;
    cov.s1 = rng.random_spd_trace_one(n);
    cov.s2 = rng.random_spd_trace_one(n);
    const auto proj = simultaneous_diagonalize(cov);
    ASSERT_EQ(proj.rows(), n);
    const Matrix d1 = proj.p_hat * cov.s1 * proj.p_hat.transpose();
    const Matrix d2 = proj.p_hat * cov.s2 * proj.p_hat.transpose();
    EXPECT_LE(off_diagonal_max(d1), 1e-10);
    EXPECT_LE(off_diagonal_max(d2), 1e-10);
    EXPECT_LE(max_abs(d1 + d2 - Matrix::Identity(n, n)), 1e-10);
    EXPECT_LE(max_abs(d1.diagonal() - proj.theta1), 1e-10);
    for (Eigen::Index i = 1; i < n; ++i) EXPECT_GE(proj.theta1(i - 1), proj.theta1(i));

    // S1 v = lambda (S1 + S2) v with v^T (S1 + S2) v = 1.
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> oracle(cov.s1, cov.s1 + cov.s2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index k = n - 1 - i;
      EXPECT_NEAR(proj.theta1(i), oracle.eigenvalues()(k), 1e-10);
      const Vector v = oracle.eigenvectors().col(k);
      const Vector row = proj.p_hat.row(i).transpose();
      const double err = std::min((row - v).cwiseAbs().maxCoeff(), (row + v).cwiseAbs().maxCoeff());
      EXPECT_LE(err, 1e-6 * std::max(1.0, v.cwiseAbs().maxCoeff())) << "n " << n << " row " << i;
    }
  }
}

TEST(SimultaneousDiagonalize, RowSignConvention) {
  Rng rng(51);
  ClassCovariancePair cov;
  cov.s1 = rng.random_spd_trace_one(7);
  cov.s2 = rng.random_spd_trace_one(7);
  const auto proj = simultaneous_diagonalize(cov);
  for (Eigen::Index i = 0; i < proj.rows(); ++i) {
    Eigen::Index k = 0;
    proj.p_hat.row(i).cwiseAbs().maxCoeff(&k);
    EXPECT_GT(proj.p_hat(i, k), 0.0);
  }
  EXPECT_LE(max_abs(proj.p_hat - proj.rotation.transpose() * proj.whitener.transpose()), 1e-13);
}

TEST(SimultaneousDiagonalize, InvariantToCommonScale) {
  Rng rng(52);
  ClassCovariancePair cov;
  cov.s1 = rng.random_spd_trace_one(5);
  cov.s2 = rng.random_spd_trace_one(5);
  ClassCovariancePair scaled{4.0 * cov.s1, 4.0 * cov.s2, 1, 1};
  const auto a = simultaneous_diagonalize(cov);
  const auto b = simultaneous_diagonalize(scaled);
  EXPECT_LE(max_abs(a.theta1 - b.theta1), 1e-12);
  EXPECT_LE(max_abs(2.0 * b.p_hat - a.p_hat), 1e-9);
}

TEST(SimultaneousDiagonalize, RankDeficiency) {
  ClassCovariancePair cov;
  cov.s1 = Eigen::Vector3d(0.6, 0.4, 0.0).asDiagonal();
  cov.s2 = Eigen::Vector3d(0.2, 0.8, 0.0).asDiagonal();
  try {
    simultaneous_diagonalize(cov);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
    EXPECT_EQ(e.indices(), std::vector<std::size_t>{0});
    EXPECT_EQ(category_of(e.code()), ErrorCategory::Numeric);
  }
  const auto proj = simultaneous_diagonalize(cov, {1e-10, true});
  EXPECT_EQ(proj.rows(), 2);
  EXPECT_EQ(proj.dimension(), 3);
  EXPECT_EQ(proj.discarded, std::vector<std::size_t>{0});
  EXPECT_NEAR(proj.theta1(0), 0.75, 1e-12);
  EXPECT_NEAR(proj.theta1(1), 1.0 / 3.0, 1e-12);
}

}  // namespace
}  // namespace gfsub
