#pragma once

#include <cstddef>
#include <string>

namespace gfsub {

enum class BandMode { All, ThirdsLow, ThirdsMid, ThirdsHigh, FixedCutoff, SubjectSpecific };

/// Contiguous run of graph-frequency indices. Indices are 1-based and
/// inclusive, counted in ascending eigenvalue order: [1, 32] is the 32 lowest
/// graph frequencies.
struct SpectralBand {
  BandMode mode = BandMode::All;
  std::size_t cutoff = 0;  // FixedCutoff / SubjectSpecific only
  std::size_t first = 1;
  std::size_t last = 0;

  std::size_t size() const { return last - first + 1; }
  std::size_t offset() const { return first - 1; }  // 0-based row of `first`

  bool operator==(const SpectralBand&) const = default;
};

/// Resolves a band request against an N-vertex graph. Thirds split:
/// low [1, ceil(N/3)], mid (ceil(N/3), ceil(2N/3)], high (ceil(2N/3), N].
/// Throws BadCutoff, or EmptyBand when a third is empty (N < 3).
SpectralBand resolve_band(BandMode mode, std::size_t cutoff, std::size_t n_vertices);

/// Parses the CLI spelling: all | lf | mf | hf | fixed:<k> | ss.
/// The cutoff of `ss` is left at 0 until a scan chooses it.
struct BandRequest {
  BandMode mode = BandMode::All;
  std::size_t cutoff = 0;

  bool operator==(const BandRequest&) const = default;
};
BandRequest parse_band(const std::string& text);
std::string to_string(const BandRequest& request);

}  // namespace gfsub
