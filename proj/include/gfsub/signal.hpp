#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "gfsub/types.hpp"

namespace gfsub {

struct Marker {
  std::size_t cue_sample = 0;
  Label label = Label::Unlabeled;
  Split split = Split::Train;
};

/// Continuous multichannel recording with cue markers.
struct Recording {
  double sample_rate = 0.0;
  Matrix samples;  // channels x time
  std::vector<Marker> markers;

  Eigen::Index channels() const { return samples.rows(); }
  Eigen::Index length() const { return samples.cols(); }
};

struct BandPassSpec {
  double low_hz = 8.0;
  double high_hz = 30.0;
  int order = 3;  // per band edge; the band-pass has twice this order
};

/// One biquad: (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct FilterCoefficients {
  std::vector<Biquad> sections;
};

/// Digital Butterworth band-pass: analog prototype, low-pass to band-pass
/// mapping, bilinear transform with both edges pre-warped. Gain is unity at
/// the (warped) geometric centre. Throws InvalidBand.
FilterCoefficients design_bandpass(const BandPassSpec& spec, double sample_rate);

std::complex<double> frequency_response(const FilterCoefficients& coeffs, double freq_hz,
                                        double sample_rate);

enum class FilterPhase { Causal, ZeroPhase };

/// Filters every row independently with zero initial state. ZeroPhase runs the
/// cascade forward then backward. Throws NonFiniteOutput.
Matrix filter_rows(const FilterCoefficients& coeffs, const Matrix& rows,
                   FilterPhase phase = FilterPhase::Causal);

Recording filter_recording(const Recording& rec, const FilterCoefficients& coeffs,
                           FilterPhase phase = FilterPhase::Causal);

struct EpochWindow {
  double offset_s = 0.5;
  double length_s = 2.0;
};

/// One trial per marker covering [cue + round(offset*fs), cue + round((offset+length)*fs)).
/// Rounding is half away from zero. Throws EpochOutOfBounds with the marker index.
std::vector<TrialMatrix> epoch_trials(const Recording& rec, const EpochWindow& window = {});

}  // namespace gfsub
