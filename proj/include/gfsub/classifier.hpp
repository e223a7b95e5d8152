#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "gfsub/subspace.hpp"
#include "gfsub/types.hpp"

namespace gfsub {

struct FeatureVector {
  Vector values;  // first-row variances, then last-row variances
  Label label = Label::Unlabeled;
  std::size_t trial_id = 0;
};

/// Sample variances (denominator T - 1) of the first and last `rows_per_end`
/// rows of P_hat * coeffs (the two blocks overlap when P_hat has fewer than
/// 2 * rows_per_end rows). With `log_variance` the natural log is taken.
/// Throws DimensionMismatch.
FeatureVector extract_features(const SpectralTrial& st, const DiscriminativeProjector& proj,
                               std::size_t rows_per_end = 1, bool log_variance = false);

struct LinearModel {
  Vector weights;
  double bias = 0.0;
  double margin_cost = 1.0;

  double decision(const Vector& x) const { return weights.dot(x) + bias; }
};

struct SolverOptions {
  double tolerance = 1e-6;  // max KKT violation m(alpha) - M(alpha)
  std::size_t max_iterations = 1'000'000;
};

/// Soft-margin linear SVM, min 1/2 |w|^2 + C sum hinge(y (w.x + b)), solved in
/// the dual with SMO (second-order working-set selection). Class 1 is the
/// positive side. Deterministic for a given input order.
/// Throws SingleClassInput, NonFiniteFeature, TrainingDidNotConverge,
/// DegenerateModel (all weights zero).
LinearModel train_classifier(std::span<const FeatureVector> features, double margin_cost = 1.0,
                             const SolverOptions& options = {});

/// sign(w.x + b) mapped to {Class1, Class2}; a decision value of exactly zero is Class1.
Label predict(const LinearModel& model, const FeatureVector& fv);

/// Zero-mean unit-variance scaling fitted on training features.
struct FeatureScaler {
  Vector mean;
  Vector scale;

  static FeatureScaler fit(std::span<const FeatureVector> features);
  FeatureVector apply(const FeatureVector& fv) const;
};

/// Text model: one decimal per line (dimension, weights..., bias, C), LF endings.
void write_model(std::ostream& out, const LinearModel& model);
LinearModel read_model(std::istream& in);

}  // namespace gfsub
