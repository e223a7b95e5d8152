#pragma once

#include <optional>
#include <span>

#include "gfsub/band.hpp"
#include "gfsub/classifier.hpp"
#include "gfsub/subspace.hpp"

namespace gfsub {

struct FitOptions {
  std::size_t rows_per_end = 1;
  double margin_cost = 1.0;
  bool log_features = false;
  bool standardize = false;
  SubspaceOptions subspace;
  SolverOptions solver;
};

/// Projector, optional scaler and classifier fitted on one band of a training set.
struct SubspaceModel {
  SpectralBand band;       // as requested
  SpectralBand effective;  // band minus graph frequency 1, which de-meaning zeroes
  DiscriminativeProjector projector;
  std::optional<FeatureScaler> scaler;
  LinearModel classifier;
  FitOptions options;

  /// Features of a full-band (or band-containing) spectral trial, scaled if fitted.
  FeatureVector features(const SpectralTrial& st) const;
  Label predict(const SpectralTrial& st) const;
};

/// Graph frequency 1 carries no energy after de-meaning and would make S1 + S2
/// singular, so it is dropped from any band that contains it. Throws EmptyBand
/// for [1, 1].
SpectralBand effective_band(const SpectralBand& band);

/// Band truncation, class covariances, simultaneous diagonalization, feature
/// extraction and SVM training on the labeled trials of `train` only.
SubspaceModel fit_subspace_model(std::span<const SpectralTrial> train, const SpectralBand& band,
                                 const FitOptions& options = {});

}  // namespace gfsub
