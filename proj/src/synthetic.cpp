#include "gfsub/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gfsub/error.hpp"
#include "gfsub/recording_io.hpp"

namespace gfsub {

namespace {

constexpr double kLeadIn_s = 3.0;
constexpr double kCueSpacing_s = 5.5;
constexpr double kCueActive_s = 3.5;
constexpr double kTail_s = 2.0;

// std::normal_distribution is implementation-defined; Box-Muller on raw 64-bit
// draws keeps generated files identical across standard libraries.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t bits() { return engine_(); }

 private:
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

double ring_kernel(double a, double b, double width) {
  const double chord_sq = 2.0 * (1.0 - std::cos(a - b));
  return std::exp(-chord_sq / (2.0 * width * width));
}

}  // namespace

Recording generate_synthetic(const SyntheticSpec& spec) {
  if (spec.channels < 3) throw Error(ErrorCode::ConfigInvalid, "need at least 3 channels");
  if (spec.trials_per_class < 1) throw Error(ErrorCode::ConfigInvalid, "need trials per class");
  if (!(spec.separation >= 0.0) || !std::isfinite(spec.separation)) {
    throw Error(ErrorCode::ConfigInvalid, "separation must be >= 0");
  }
  if (!(spec.train_fraction > 0.0 && spec.train_fraction <= 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, "train fraction must be in (0, 1]");
  }
  if (spec.sample_rate <= 0) throw Error(ErrorCode::ConfigInvalid, "sample rate must be > 0");

  const auto n = static_cast<Eigen::Index>(spec.channels);
  const double fs = spec.sample_rate;
  NormalSource rng(spec.seed);

  std::vector<double> angle(spec.channels);
  for (std::size_t c = 0; c < spec.channels; ++c) {
    angle[c] = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(n);
  }
  Matrix mixing(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) mixing(i, j) = ring_kernel(angle[i], angle[j], 0.35);
  }
  Matrix patterns(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    patterns(i, 0) = ring_kernel(angle[i], 0.0, 0.6);
    patterns(i, 1) = ring_kernel(angle[i], std::numbers::pi / 2.0, 0.6);
  }

  // Balanced class sequence in random order.
  std::vector<Label> order;
  for (std::size_t k = 0; k < spec.trials_per_class; ++k) {
    order.push_back(Label::Class1);
    order.push_back(Label::Class2);
  }
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.bits() % i)]);
  }

  const auto lead = static_cast<Eigen::Index>(std::lround(kLeadIn_s * fs));
  const auto spacing = static_cast<Eigen::Index>(std::lround(kCueSpacing_s * fs));
  const auto active = static_cast<Eigen::Index>(std::lround(kCueActive_s * fs));
  const auto tail = static_cast<Eigen::Index>(std::lround(kTail_s * fs));
  const auto total = lead + spacing * static_cast<Eigen::Index>(order.size()) + tail;

  Recording rec;
  rec.sample_rate = fs;
  rec.samples.resize(n, total);
  Vector sources(n);
  for (Eigen::Index t = 0; t < total; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) sources(i) = rng();
    rec.samples.col(t) = mixing * sources;
    for (Eigen::Index i = 0; i < n; ++i) rec.samples(i, t) += 0.3 * rng();
  }

  const auto n_train =
      static_cast<std::size_t>(std::lround(spec.train_fraction * static_cast<double>(spec.trials_per_class)));
  std::size_t seen[2] = {0, 0};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Eigen::Index cue = lead + spacing * static_cast<Eigen::Index>(k);
    const int cls = order[k] == Label::Class1 ? 0 : 1;
    for (Eigen::Index t = cue; t < cue + active; ++t) {
      rec.samples.col(t) += spec.separation * rng() * patterns.col(cls);
    }
    Marker m;
    m.cue_sample = static_cast<std::size_t>(cue);
    m.label = order[k];
    m.split = seen[cls]++ < n_train ? Split::Train : Split::Test;
    rec.markers.push_back(m);
  }
  return rec;
}

void write_synthetic(const std::filesystem::path& dir, const std::string& name,
                     const SyntheticSpec& spec) {
  write_recording(dir, name, generate_synthetic(spec));
}

}  // namespace gfsub
