#pragma once

#include <filesystem>
#include <string>

#include "gfsub/signal.hpp"

namespace gfsub {

/// Neutral recording format, three files sharing a stem:
///   <name>.meta         `key=value` lines: channels, sample_rate_hz, samples
///   <name>.f32          little-endian float32, time-major (sample 0 ch 0..N-1, sample 1, ...)
///   <name>.markers.csv  header `cue_sample,label,split`; label in {0,1,2}, split in {train,test}
///
/// Errors: MalformedMeta, SizeMismatch, BadMarker, IoFailure.
Recording read_recording(const std::filesystem::path& dir, const std::string& name);

/// Samples are cast to float32 (round to nearest even).
void write_recording(const std::filesystem::path& dir, const std::string& name,
                     const Recording& rec);

}  // namespace gfsub
