#include "gfsub/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gfsub/error.hpp"
#include "gfsub/format.hpp"

namespace gfsub {

namespace {

using cplx = std::complex<double>;

cplx bilinear(cplx s, double fs2) { return (fs2 + s) / (fs2 - s); }

}  // namespace

FilterCoefficients design_bandpass(const BandPassSpec& spec, double sample_rate) {
  if (!(sample_rate > 0.0)) {
    throw Error(ErrorCode::InvalidBand, "sample rate must be positive");
  }
  const double nyquist = sample_rate / 2.0;
  if (!(spec.low_hz > 0.0 && spec.low_hz < spec.high_hz && spec.high_hz < nyquist)) {
    throw Error(ErrorCode::InvalidBand, "need 0 < low < high < fs/2, got " +
                                            format_exact(spec.low_hz) + ".." +
                                            format_exact(spec.high_hz) + " Hz at fs " +
                                            format_exact(sample_rate));
  }
  if (spec.order < 1) {
    throw Error(ErrorCode::InvalidBand, "filter order must be >= 1");
  }

  const double fs2 = 2.0 * sample_rate;
  const double w_lo = fs2 * std::tan(std::numbers::pi * spec.low_hz / sample_rate);
  const double w_hi = fs2 * std::tan(std::numbers::pi * spec.high_hz / sample_rate);
  const double bw = w_hi - w_lo;
  const double w0_sq = w_lo * w_hi;
  const int n = spec.order;

  // Each prototype pole p maps to the roots of s^2 - p*bw*s + w0^2. Poles with
  // Im(p) < 0 are the conjugates of ones already handled, so walk the upper
  // half-plane (and the real pole for odd n) only.
  FilterCoefficients out;
  auto add_section = [&](cplx z1, cplx z2) {
    Biquad q;
    q.b0 = 1.0;
    q.b1 = 0.0;
    q.b2 = -1.0;  // zeros at z = 1 and z = -1
    q.a1 = -(z1 + z2).real();
    q.a2 = (z1 * z2).real();
    out.sections.push_back(q);
  };

  for (int k = 0; k < n; ++k) {
    const double angle = std::numbers::pi * (2.0 * k + n + 1) / (2.0 * n);
    const cplx p = std::polar(1.0, angle);
    if (p.imag() < -1e-12) continue;
    const cplx disc = std::sqrt(p * p * bw * bw - 4.0 * w0_sq);
    const cplx s1 = (p * bw + disc) / 2.0;
    const cplx s2 = (p * bw - disc) / 2.0;
    const cplx z1 = bilinear(s1, fs2);
    const cplx z2 = bilinear(s2, fs2);
    if (std::abs(p.imag()) <= 1e-12) {
      // Real prototype pole: its two band-pass poles are conjugates (or both real).
      add_section(z1, z2);
    } else {
      add_section(z1, std::conj(z1));
      add_section(z2, std::conj(z2));
    }
  }

  // Unity gain at the digital image of the analog centre frequency.
  const double f_centre = sample_rate / std::numbers::pi * std::atan(std::sqrt(w0_sq) / fs2);
  const double gain = std::abs(frequency_response(out, f_centre, sample_rate));
  out.sections.front().b0 /= gain;
  out.sections.front().b1 /= gain;
  out.sections.front().b2 /= gain;
  return out;
}

std::complex<double> frequency_response(const FilterCoefficients& coeffs, double freq_hz,
                                        double sample_rate) {
  const cplx zinv = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_rate);
  const cplx zinv2 = zinv * zinv;
  cplx h = 1.0;
  for (const auto& q : coeffs.sections) {
    h *= (q.b0 + q.b1 * zinv + q.b2 * zinv2) / (1.0 + q.a1 * zinv + q.a2 * zinv2);
  }
  return h;
}

namespace {

// Transposed direct form II, zero initial state, in place.
void run_cascade(const FilterCoefficients& coeffs, double* x, Eigen::Index n, Eigen::Index stride) {
  for (const auto& q : coeffs.sections) {
    double s1 = 0.0, s2 = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
      double& v = x[t * stride];
      const double in = v;
      const double y = q.b0 * in + s1;
      s1 = q.b1 * in - q.a1 * y + s2;
      s2 = q.b2 * in - q.a2 * y;
      v = y;
    }
  }
}

}  // namespace

Matrix filter_rows(const FilterCoefficients& coeffs, const Matrix& rows, FilterPhase phase) {
  // Work on a row-major copy so each channel is contiguous.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> work = rows;
  const Eigen::Index n = work.cols();
  for (Eigen::Index c = 0; c < work.rows(); ++c) {
    double* row = work.row(c).data();
    run_cascade(coeffs, row, n, 1);
    if (phase == FilterPhase::ZeroPhase) {
      std::reverse(row, row + n);
      run_cascade(coeffs, row, n, 1);
      std::reverse(row, row + n);
    }
  }
  if (!work.allFinite()) {
    throw Error(ErrorCode::NonFiniteOutput, "filter produced non-finite samples");
  }
  return work;
}

Recording filter_recording(const Recording& rec, const FilterCoefficients& coeffs,
                           FilterPhase phase) {
  Recording out;
  out.sample_rate = rec.sample_rate;
  out.markers = rec.markers;
  out.samples = filter_rows(coeffs, rec.samples, phase);
  return out;
}

std::vector<TrialMatrix> epoch_trials(const Recording& rec, const EpochWindow& window) {
  if (!(window.offset_s >= 0.0) || !(window.length_s > 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "epoch offset must be >= 0 and length > 0");
  }
  const long start_off = std::lround(window.offset_s * rec.sample_rate);
  const long end_off = std::lround((window.offset_s + window.length_s) * rec.sample_rate);
  const long width = end_off - start_off;
  if (width <= 0) {
    throw Error(ErrorCode::ConfigInvalid, "epoch window rounds to zero samples");
  }

  std::vector<TrialMatrix> trials;
  trials.reserve(rec.markers.size());
  for (std::size_t k = 0; k < rec.markers.size(); ++k) {
    const auto& m = rec.markers[k];
    const long first = static_cast<long>(m.cue_sample) + start_off;
    if (first + width > static_cast<long>(rec.length())) {
      throw Error(ErrorCode::EpochOutOfBounds,
                  "marker " + std::to_string(k) + " at sample " + std::to_string(m.cue_sample) +
                      " needs samples up to " + std::to_string(first + width) +
                      ", recording has " + std::to_string(rec.length()),
                  {k});
    }
    TrialMatrix trial;
    trial.data = rec.samples.middleCols(first, width);
    trial.label = m.label;
    trial.trial_id = k;
    trial.split = m.split;
    trials.push_back(std::move(trial));
  }
  return trials;
}

}  // namespace gfsub
