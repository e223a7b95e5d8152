#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "gfsub/signal.hpp"

namespace gfsub {

/// Planted two-class recording. Electrodes sit on a ring; background activity
/// is white noise mixed by a smooth spatial kernel, so the correlation graph
/// follows ring distance. During each cue (3.5 s) a class-specific broad
/// spatial pattern is driven by its own white source with amplitude
/// `separation`. Broad patterns concentrate in the low graph frequencies.
/// separation = 0 makes the classes exchangeable.
struct SyntheticSpec {
  std::uint64_t seed = 1;
  std::size_t channels = 16;
  std::size_t trials_per_class = 100;
  double separation = 1.0;
  double train_fraction = 0.5;  // per class, earliest trials are training
  int sample_rate = 100;
};

/// Throws ConfigInvalid.
Recording generate_synthetic(const SyntheticSpec& spec);

/// Writes `<dir>/<name>.{meta,f32,markers.csv}`. Throws IoFailure.
void write_synthetic(const std::filesystem::path& dir, const std::string& name,
                     const SyntheticSpec& spec);

}  // namespace gfsub
