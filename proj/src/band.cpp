#include "gfsub/band.hpp"

#include <charconv>

#include "gfsub/error.hpp"

namespace gfsub {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

SpectralBand resolve_band(BandMode mode, std::size_t cutoff, std::size_t n_vertices) {
  if (n_vertices == 0) throw Error(ErrorCode::EmptyBand, "graph has no vertices");
  SpectralBand band;
  band.mode = mode;
  const std::size_t third = ceil_div(n_vertices, 3);
  const std::size_t two_thirds = ceil_div(2 * n_vertices, 3);
  switch (mode) {
    case BandMode::All:
      band.first = 1;
      band.last = n_vertices;
      break;
    case BandMode::ThirdsLow:
      band.first = 1;
      band.last = third;
      break;
    case BandMode::ThirdsMid:
      band.first = third + 1;
      band.last = two_thirds;
      break;
    case BandMode::ThirdsHigh:
      band.first = two_thirds + 1;
      band.last = n_vertices;
      break;
    case BandMode::FixedCutoff:
    case BandMode::SubjectSpecific:
      if (cutoff < 1 || cutoff > n_vertices) {
        throw Error(ErrorCode::BadCutoff, "cutoff " + std::to_string(cutoff) + " outside [1, " +
                                              std::to_string(n_vertices) + "]");
      }
      band.cutoff = cutoff;
      band.first = 1;
      band.last = cutoff;
      break;
  }
  if (band.last < band.first) {
    throw Error(ErrorCode::EmptyBand, "band resolves to no indices for N = " +
                                          std::to_string(n_vertices));
  }
  return band;
}

BandRequest parse_band(const std::string& text) {
  if (text == "all" || text == "af") return {BandMode::All, 0};
  if (text == "lf") return {BandMode::ThirdsLow, 0};
  if (text == "mf") return {BandMode::ThirdsMid, 0};
  if (text == "hf") return {BandMode::ThirdsHigh, 0};
  if (text == "ss") return {BandMode::SubjectSpecific, 0};
  constexpr std::string_view prefix = "fixed:";
  if (text.starts_with(prefix)) {
    std::size_t k = 0;
    const char* b = text.data() + prefix.size();
    const char* e = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(b, e, k);
    if (ec == std::errc() && ptr == e && b != e && k >= 1) return {BandMode::FixedCutoff, k};
    throw Error(ErrorCode::BadCutoff, "bad cutoff in band '" + text + "'");
  }
  throw Error(ErrorCode::ConfigInvalid,
              "unknown band '" + text + "' (expected all, lf, mf, hf, fixed:<k> or ss)");
}

std::string to_string(const BandRequest& request) {
  switch (request.mode) {
    case BandMode::All: return "all";
    case BandMode::ThirdsLow: return "lf";
    case BandMode::ThirdsMid: return "mf";
    case BandMode::ThirdsHigh: return "hf";
    case BandMode::FixedCutoff: return "fixed:" + std::to_string(request.cutoff);
    case BandMode::SubjectSpecific: return "ss";
  }
  return "all";
}

}  // namespace gfsub
