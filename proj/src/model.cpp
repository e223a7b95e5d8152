#include "gfsub/model.hpp"

#include <vector>

#include "gfsub/error.hpp"

namespace gfsub {

SpectralBand effective_band(const SpectralBand& band) {
  SpectralBand out = band;
  if (out.first == 1) out.first = 2;
  if (out.last < out.first) {
    throw Error(ErrorCode::EmptyBand, "band [" + std::to_string(band.first) + ", " +
                                          std::to_string(band.last) +
                                          "] holds only the zeroed first graph frequency");
  }
  return out;
}

FeatureVector SubspaceModel::features(const SpectralTrial& st) const {
  const SpectralTrial cut = st.band == effective ? st : truncate_band(st, effective);
  FeatureVector fv = extract_features(cut, projector, options.rows_per_end, options.log_features);
  return scaler ? scaler->apply(fv) : fv;
}

Label SubspaceModel::predict(const SpectralTrial& st) const {
  return gfsub::predict(classifier, features(st));
}

SubspaceModel fit_subspace_model(std::span<const SpectralTrial> train, const SpectralBand& band,
                                 const FitOptions& options) {
  SubspaceModel model;
  model.band = band;
  model.effective = effective_band(band);

  std::vector<SpectralTrial> cut;
  cut.reserve(train.size());
  for (const auto& st : train) {
    if (is_labeled(st.label)) {
      cut.push_back(st.band == model.effective ? st : truncate_band(st, model.effective));
    }
  }

  model.options = options;
  model.projector = simultaneous_diagonalize(class_covariances(cut), options.subspace);

  std::vector<FeatureVector> feats;
  feats.reserve(cut.size());
  for (const auto& st : cut) {
    feats.push_back(extract_features(st, model.projector, options.rows_per_end,
                                     options.log_features));
  }
  if (options.standardize) {
    model.scaler = FeatureScaler::fit(feats);
    for (auto& fv : feats) fv = model.scaler->apply(fv);
  }
  model.classifier = train_classifier(feats, options.margin_cost, options.solver);
  return model;
}

}  // namespace gfsub
