#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "gfsub/classifier.hpp"
#include "gfsub/error.hpp"
#include "test_util.hpp"

namespace gfsub {
namespace {

using testing::Rng;

FeatureVector fv(std::initializer_list<double> v, Label label, std::size_t id = 0) {
  FeatureVector f;
  f.values = Eigen::Map<const Vector>(v.begin(), static_cast<Eigen::Index>(v.size()));
  f.label = label;
  f.trial_id = id;
  return f;
}

// Soft-margin primal objective, evaluated independently of the solver.
double primal(const std::vector<FeatureVector>& data, const Vector& w, double b, double c) {
  double loss = 0.0;
  for (const auto& f : data) {
    const double y = f.label == Label::Class1 ? 1.0 : -1.0;
    loss += std::max(0.0, 1.0 - y * (w.dot(f.values) + b));
  }
  return 0.5 * w.squaredNorm() + c * loss;
}

std::vector<FeatureVector> gaussian_blobs(Rng& rng, int per_class, double gap, Eigen::Index dim) {
  std::vector<FeatureVector> out;
  for (int i = 0; i < 2 * per_class; ++i) {
    FeatureVector f;
    f.label = i % 2 ? Label::Class2 : Label::Class1;
    f.values = rng.normal_matrix(dim, 1);
    f.values(0) += f.label == Label::Class1 ? gap : -gap;
    f.trial_id = static_cast<std::size_t>(i);
    out.push_back(f);
  }
  return out;
}

TEST(ExtractFeatures, SampleVarianceWithUnbiasedDenominator) {
  DiscriminativeProjector proj;
  proj.p_hat = Matrix::Identity(2, 2);
  proj.theta1 = Eigen::Vector2d(0.6, 0.4);
  SpectralTrial st;
  st.coeffs.resize(2, 4);
  st.coeffs << 1, -1, 1, -1,  //
      2, 2, 2, 2;
  st.label = Label::Class2;
  st.trial_id = 5;
  const auto f = extract_features(st, proj);
  ASSERT_EQ(f.values.size(), 2);
  EXPECT_DOUBLE_EQ(f.values(0), 4.0 / 3.0);
  EXPECT_EQ(f.values(1), 0.0);
  EXPECT_EQ(f.label, Label::Class2);
  EXPECT_EQ(f.trial_id, 5u);
  const auto logf = extract_features(st, proj, 1, true);
  EXPECT_DOUBLE_EQ(logf.values(0), std::log(4.0 / 3.0));
}

TEST(ExtractFeatures, TakesFirstAndLastRows) {
  Rng rng(61);
  DiscriminativeProjector proj;
  proj.p_hat = rng.normal_matrix(6, 6);
  proj.theta1 = Vector::LinSpaced(6, 0.9, 0.1);
  SpectralTrial st;
  st.coeffs = rng.normal_matrix(6, 50);
  const auto f = extract_features(st, proj, 2);
  ASSERT_EQ(f.values.size(), 4);
  const Matrix z = proj.p_hat * st.coeffs;
  const int rows[] = {0, 1, 4, 5};
  for (int k = 0; k < 4; ++k) {
    const auto row = z.row(rows[k]).array();
    const double var = (row - row.mean()).square().sum() / 49.0;
    EXPECT_NEAR(f.values(k), var, 1e-12 * var);
  }
  EXPECT_EQ(extract_features(st, proj, 4).values.size(), 8);
  EXPECT_THROW(extract_features(st, proj, 7), Error);
  st.coeffs = rng.normal_matrix(5, 50);
  EXPECT_THROW(extract_features(st, proj), Error);
}

TEST(TrainClassifier, TwoPointsGiveTheMaximumMarginSeparator) {
  const std::vector<FeatureVector> data{fv({1.0, 0.0}, Label::Class1), fv({-1.0, 0.0}, Label::Class2)};
  const auto m = train_classifier(data, 1.0);
  EXPECT_NEAR(m.weights(0), 1.0, 1e-9);
  EXPECT_NEAR(m.weights(1), 0.0, 1e-12);
  EXPECT_NEAR(m.bias, 0.0, 1e-9);
  EXPECT_EQ(m.margin_cost, 1.0);
}

TEST(TrainClassifier, OffsetPointsMoveTheBias) {
  const std::vector<FeatureVector> data{fv({3.0}, Label::Class1), fv({1.0}, Label::Class2)};
  const auto m = train_classifier(data, 10.0);
  EXPECT_NEAR(m.weights(0), 1.0, 1e-9);
  EXPECT_NEAR(m.bias, -2.0, 1e-9);
}

TEST(TrainClassifier, SeparableDataIsFit) {
  Rng rng(62);
  const auto data = gaussian_blobs(rng, 40, 5.0, 3);
  const auto m = train_classifier(data, 10.0);
  for (const auto& f : data) EXPECT_EQ(predict(m, f), f.label);
}

TEST(TrainClassifier, PrimalObjectiveIsLocallyMinimal) {
  Rng rng(63);
  for (double c : {0.1, 1.0, 10.0}) {
    const auto data = gaussian_blobs(rng, 30, 0.8, 4);
    const auto m = train_classifier(data, c, {1e-10, 1'000'000});
    const double best = primal(data, m.weights, m.bias, c);
    for (int trial = 0; trial < 400; ++trial) {
      const double step = trial < 200 ? 1e-3 : 1e-1;
      const Vector dw = step * rng.normal_matrix(4, 1);
      const double db = step * rng.normal();
      EXPECT_GE(primal(data, m.weights + dw, m.bias + db, c), best - 1e-7 * std::max(1.0, best))
          << "C " << c;
    }
  }
}

TEST(TrainClassifier, DuplicatingDataWithHalfCostKeepsTheBoundary) {
  Rng rng(64);
  const auto data = gaussian_blobs(rng, 25, 0.7, 3);
  std::vector<FeatureVector> twice = data;
  twice.insert(twice.end(), data.begin(), data.end());
  const SolverOptions tight{1e-12, 10'000'000};
  const auto a = train_classifier(data, 2.0, tight);
  const auto b = train_classifier(twice, 1.0, tight);
  EXPECT_LE((a.weights - b.weights).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_NEAR(a.bias, b.bias, 1e-6);
}

TEST(TrainClassifier, DeterministicAndUnlabeledIgnored) {
  Rng rng(65);
  auto data = gaussian_blobs(rng, 20, 0.5, 2);
  const auto a = train_classifier(data);
  data.push_back(fv({100.0, -100.0}, Label::Unlabeled, 999));
  const auto b = train_classifier(data);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
}

TEST(TrainClassifier, Errors) {
  const std::vector<FeatureVector> single{fv({1.0}, Label::Class1), fv({2.0}, Label::Class1)};
  try {
    train_classifier(single);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleClassInput);
  }
  const std::vector<FeatureVector> bad{fv({1.0}, Label::Class1), fv({NAN}, Label::Class2, 4)};
  try {
    train_classifier(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteFeature);
    EXPECT_EQ(e.indices().at(0), 4u);
  }
  const std::vector<FeatureVector> same{fv({1.0}, Label::Class1), fv({1.0}, Label::Class2)};
  try {
    train_classifier(same);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateModel);
  }
  Rng rng(66);
  const auto hard = gaussian_blobs(rng, 50, 0.1, 2);
  try {
    train_classifier(hard, 1.0, {1e-6, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TrainingDidNotConverge);
  }
}

TEST(Predict, ZeroDecisionIsClassOne) {
  LinearModel m;
  m.weights = Eigen::Vector2d(1.0, -1.0);
  m.bias = 0.0;
  EXPECT_EQ(predict(m, fv({2.0, 2.0}, Label::Unlabeled)), Label::Class1);
  EXPECT_EQ(predict(m, fv({1.0, 2.0}, Label::Unlabeled)), Label::Class2);
  EXPECT_EQ(predict(m, fv({2.0, 1.0}, Label::Unlabeled)), Label::Class1);
  EXPECT_THROW(predict(m, fv({1.0}, Label::Unlabeled)), Error);
}

TEST(FeatureScaler, StandardizesTrainingFeatures) {
  Rng rng(67);
  auto data = gaussian_blobs(rng, 20, 3.0, 3);
  for (auto& f : data) f.values(1) = 5.0;
  const auto s = FeatureScaler::fit(data);
  Vector sum = Vector::Zero(3), sq = Vector::Zero(3);
  for (const auto& f : data) {
    const Vector v = s.apply(f).values;
    sum += v;
    sq += v.cwiseAbs2();
  }
  EXPECT_LE(sum.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(sq(0) / 39.0, 1.0, 1e-12);
  EXPECT_EQ(s.scale(1), 1.0);
}

TEST(ModelText, RoundTripsExactly) {
  LinearModel m;
  m.weights = Eigen::Vector3d(0.1, -2.5e-17, 123456.789);
  m.bias = -1.0 / 3.0;
  m.margin_cost = 0.5;
  std::stringstream ss;
  write_model(ss, m);
  const auto back = read_model(ss);
  EXPECT_EQ(back.weights, m.weights);
  EXPECT_EQ(back.bias, m.bias);
  EXPECT_EQ(back.margin_cost, m.margin_cost);

  std::stringstream truncated("3\n0.1\n");
  EXPECT_THROW(read_model(truncated), Error);
}

}  // namespace
}  // namespace gfsub
