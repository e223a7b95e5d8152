#include "gfsub/recording_io.hpp"

#include <bit>
#include <limits>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "gfsub/error.hpp"

namespace gfsub {

namespace fs = std::filesystem;

namespace {

static_assert(std::numeric_limits<float>::is_iec559, "float32 must be IEEE-754");

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool parse_int(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xFF) << 24) | ((v & 0xFF00) << 8) | ((v >> 8) & 0xFF00) | (v >> 24);
  }
  return v;
}

struct Meta {
  long channels = 0;
  long sample_rate = 0;
  long samples = 0;
};

Meta read_meta(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());

  std::map<std::string, long> values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::MalformedMeta,
                  path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string val = trim(std::string_view(t).substr(eq + 1));
    long parsed = 0;
    if (!parse_int(val, parsed)) {
      throw Error(ErrorCode::MalformedMeta, path.string() + ":" + std::to_string(lineno) +
                                                ": value of '" + key + "' is not an integer");
    }
    values[key] = parsed;
  }

  Meta meta;
  for (auto [key, dest] : {std::pair{"channels", &meta.channels},
                           std::pair{"sample_rate_hz", &meta.sample_rate},
                           std::pair{"samples", &meta.samples}}) {
    auto it = values.find(key);
    if (it == values.end()) {
      throw Error(ErrorCode::MalformedMeta, path.string() + ": missing key '" + key + "'");
    }
    if (it->second <= 0) {
      throw Error(ErrorCode::MalformedMeta, path.string() + ": '" + key + "' must be positive");
    }
    *dest = it->second;
  }
  return meta;
}

std::vector<Marker> read_markers(const fs::path& path, long total_samples) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line) || trim(line) != "cue_sample,label,split") {
    throw Error(ErrorCode::BadMarker, path.string() + ": header must be 'cue_sample,label,split'");
  }
  std::vector<Marker> markers;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const std::size_t row = markers.size();
    auto bad = [&](const std::string& why) {
      return Error(ErrorCode::BadMarker, path.string() + ":" + std::to_string(lineno) + ": " + why,
                   {row});
    };

    std::vector<std::string> fields;
    std::stringstream ss(t);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 3) throw bad("expected 3 fields");

    Marker m;
    long cue = 0;
    int label = 0;
    if (!parse_int(fields[0], cue) || cue < 0 || cue >= total_samples) {
      throw bad("cue_sample out of range");
    }
    m.cue_sample = static_cast<std::size_t>(cue);
    if (!parse_int(fields[1], label) || label < 0 || label > 2) throw bad("label must be 0, 1 or 2");
    m.label = static_cast<Label>(label);
    if (fields[2] == "train") {
      m.split = Split::Train;
    } else if (fields[2] == "test") {
      m.split = Split::Test;
    } else {
      throw bad("split must be train or test");
    }
    if (m.split == Split::Train && m.label == Label::Unlabeled) {
      throw bad("training markers must carry label 1 or 2");
    }
    markers.push_back(m);
  }
  return markers;
}

}  // namespace

Recording read_recording(const fs::path& dir, const std::string& name) {
  const Meta meta = read_meta(dir / (name + ".meta"));

  const fs::path data_path = dir / (name + ".f32");
  std::error_code ec;
  const auto bytes = fs::file_size(data_path, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot stat " + data_path.string());
  const std::uintmax_t expected =
      static_cast<std::uintmax_t>(meta.channels) * static_cast<std::uintmax_t>(meta.samples) * 4u;
  if (bytes != expected) {
    throw Error(ErrorCode::SizeMismatch, data_path.string() + " has " + std::to_string(bytes) +
                                             " bytes, meta implies " + std::to_string(expected));
  }

  std::ifstream in(data_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + data_path.string());
  std::vector<std::uint32_t> raw(static_cast<std::size_t>(meta.channels * meta.samples));
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(expected));
  if (!in) throw Error(ErrorCode::IoFailure, "short read on " + data_path.string());

  Recording rec;
  rec.sample_rate = static_cast<double>(meta.sample_rate);
  rec.samples.resize(meta.channels, meta.samples);
  std::size_t idx = 0;
  for (long t = 0; t < meta.samples; ++t) {
    for (long c = 0; c < meta.channels; ++c) {
      const float v = std::bit_cast<float>(to_little(raw[idx++]));
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::NonFiniteInput, data_path.string() + ": non-finite sample at t=" +
                                                 std::to_string(t) + " c=" + std::to_string(c));
      }
      rec.samples(c, t) = static_cast<double>(v);
    }
  }

  rec.markers = read_markers(dir / (name + ".markers.csv"), meta.samples);
  return rec;
}

void write_recording(const fs::path& dir, const std::string& name, const Recording& rec) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string());

  const double rate = std::round(rec.sample_rate);
  if (rate != rec.sample_rate || rate <= 0) {
    throw Error(ErrorCode::ConfigInvalid, "neutral format needs a positive integer sample rate");
  }

  {
    std::ofstream meta(dir / (name + ".meta"), std::ios::binary);
    meta << "channels=" << rec.channels() << '\n'
         << "sample_rate_hz=" << static_cast<long>(rate) << '\n'
         << "samples=" << rec.length() << '\n';
    if (!meta) throw Error(ErrorCode::IoFailure, "cannot write meta for " + name);
  }
  {
    std::vector<std::uint32_t> raw;
    raw.reserve(static_cast<std::size_t>(rec.channels() * rec.length()));
    for (Eigen::Index t = 0; t < rec.length(); ++t) {
      for (Eigen::Index c = 0; c < rec.channels(); ++c) {
        raw.push_back(to_little(std::bit_cast<std::uint32_t>(static_cast<float>(rec.samples(c, t)))));
      }
    }
    std::ofstream data(dir / (name + ".f32"), std::ios::binary);
    data.write(reinterpret_cast<const char*>(raw.data()),
               static_cast<std::streamsize>(raw.size() * sizeof(std::uint32_t)));
    if (!data) throw Error(ErrorCode::IoFailure, "cannot write samples for " + name);
  }
  {
    std::ofstream markers(dir / (name + ".markers.csv"), std::ios::binary);
    markers << "cue_sample,label,split\n";
    for (const auto& m : rec.markers) {
      markers << m.cue_sample << ',' << static_cast<int>(m.label) << ','
              << (m.split == Split::Train ? "train" : "test") << '\n';
    }
    if (!markers) throw Error(ErrorCode::IoFailure, "cannot write markers for " + name);
  }
}

}  // namespace gfsub
