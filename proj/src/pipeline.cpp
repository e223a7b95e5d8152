#include "gfsub/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "gfsub/error.hpp"
#include "gfsub/format.hpp"
#include "gfsub/recording_io.hpp"
#include "gfsub/subspace.hpp"

namespace gfsub {

namespace {

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw e.with_context(name);
  }
}

const char* split_name(Split s) { return s == Split::Train ? "train" : "test"; }

double accuracy_of(std::span<const TrialOutcome> outcomes, Split split) {
  std::size_t correct = 0, total = 0;
  for (const auto& o : outcomes) {
    if (o.split != split || !is_labeled(o.true_label)) continue;
    ++total;
    correct += o.predicted == o.true_label;
  }
  if (total == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& why) { return Error(ErrorCode::ConfigInvalid, why); };
  if (rows_per_end < 1) throw fail("rows_per_end must be >= 1");
  if (!(margin_cost > 0.0) || !std::isfinite(margin_cost)) throw fail("margin cost must be > 0");
  if (folds < 2) throw fail("folds must be >= 2");
  if (!(epoch.offset_s >= 0.0) || !(epoch.length_s > 0.0)) throw fail("bad epoch window");
  if (!(rank_tol > 0.0) || rank_tol >= 1.0) throw fail("rank_tol must be in (0, 1)");
  if (filter.order < 1) throw fail("filter order must be >= 1");
}

FitOptions ExperimentConfig::fit_options() const {
  FitOptions fit;
  fit.rows_per_end = rows_per_end;
  fit.margin_cost = margin_cost;
  fit.log_features = log_features;
  fit.standardize = standardize;
  fit.subspace.rank_tol = rank_tol;
  fit.subspace.allow_rank_reduction = allow_rank_reduction;
  return fit;
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  std::ostringstream text;
  text << "data_dir=" << c.data_dir.generic_string() << '\n'
       << "subject=" << c.subject << '\n'
       << "band=" << to_string(c.band) << '\n'
       << "rows_per_end=" << c.rows_per_end << '\n'
       << "margin_cost=" << format_exact(c.margin_cost) << '\n'
       << "folds=" << c.folds << '\n'
       << "seed=" << c.seed << '\n'
       << "filter=" << format_exact(c.filter.low_hz) << ',' << format_exact(c.filter.high_hz)
       << ',' << c.filter.order << '\n'
       << "epoch=" << format_exact(c.epoch.offset_s) << ',' << format_exact(c.epoch.length_s)
       << '\n'
       << "filter_scope=" << (c.filter_scope == FilterScope::Recording ? "recording" : "epoch")
       << '\n'
       << "filter_phase=" << (c.filter_phase == FilterPhase::Causal ? "causal" : "zero") << '\n'
       << "log_features=" << c.log_features << '\n'
       << "standardize=" << c.standardize << '\n'
       << "allow_rank_reduction=" << c.allow_rank_reduction << '\n'
       << "rank_tol=" << format_exact(c.rank_tol) << '\n';

  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text.str()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

PreparedSubject prepare_subject(const Recording& recording, const ExperimentConfig& config) {
  const FilterCoefficients coeffs =
      stage("filter design", [&] { return design_bandpass(config.filter, recording.sample_rate); });

  std::vector<TrialMatrix> trials = stage("epoching", [&] {
    if (config.filter_scope == FilterScope::Recording) {
      return epoch_trials(filter_recording(recording, coeffs, config.filter_phase), config.epoch);
    }
    auto raw = epoch_trials(recording, config.epoch);
    for (auto& t : raw) t.data = filter_rows(coeffs, t.data, config.filter_phase);
    return raw;
  });

  std::vector<TrialMatrix> train, test;
  for (auto& t : trials) {
    if (t.split == Split::Train) {
      train.push_back(std::move(t));
    } else {
      test.push_back(std::move(t));
    }
  }
  if (train.empty()) {
    throw Error(ErrorCode::MissingClass, "subject has no training trials").with_context("epoching");
  }

  ConnectivityGraph graph = stage("graph", [&] { return build_graph(train); });
  GraphSpectrum spec = stage("spectrum", [&] { return spectrum(graph); });
  return PreparedSubject{std::move(train), std::move(test), std::move(graph), std::move(spec)};
}

ExperimentResult classify_trials(std::span<const TrialMatrix> train,
                                 std::span<const TrialMatrix> test, const GraphSpectrum& spectrum,
                                 const ExperimentConfig& config) {
  config.validate();
  const auto normalize_all = [&](std::span<const TrialMatrix> trials) {
    std::vector<SpectralTrial> out;
    out.reserve(trials.size());
    for (const auto& t : trials) out.push_back(normalize_trial(t, spectrum));
    return out;
  };
  const std::vector<SpectralTrial> train_st =
      stage("normalization", [&] { return normalize_all(train); });
  const std::vector<SpectralTrial> test_st =
      stage("normalization", [&] { return normalize_all(test); });

  const auto n = static_cast<std::size_t>(spectrum.size());
  const FitOptions fit = config.fit_options();

  ExperimentResult result;
  result.subject = config.subject;
  result.config_hash = config_hash(config);
  result.band = stage("band selection", [&] {
    if (config.band.mode != BandMode::SubjectSpecific) {
      return resolve_band(config.band.mode, config.band.cutoff, n);
    }
    CvOptions cv;
    cv.folds = config.folds;
    cv.seed = config.seed;
    cv.fit = fit;
    result.scan = cv_scan(train_st, cv);
    return select_subject_specific(*result.scan);
  });

  result.model = stage("training", [&] { return fit_subspace_model(train_st, result.band, fit); });

  stage("prediction", [&] {
    for (const auto* set : {&train_st, &test_st}) {
      const Split split = set == &train_st ? Split::Train : Split::Test;
      for (const auto& st : *set) {
        result.per_trial.push_back({st.trial_id, split, st.label, result.model.predict(st)});
      }
    }
  });
  std::sort(result.per_trial.begin(), result.per_trial.end(),
            [](const auto& a, const auto& b) { return a.trial_id < b.trial_id; });
  result.train_accuracy = accuracy_of(result.per_trial, Split::Train);
  result.test_accuracy = accuracy_of(result.per_trial, Split::Test);
  return result;
}

ExperimentResult run_experiment(const Recording& recording, const ExperimentConfig& config) {
  config.validate();
  const PreparedSubject prepared = prepare_subject(recording, config);
  return classify_trials(prepared.train, prepared.test, prepared.spectrum, config);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Recording recording =
      stage("loading", [&] { return read_recording(config.data_dir, config.subject); });
  return run_experiment(recording, config);
}

void write_trials_csv(std::ostream& out, const ExperimentResult& result) {
  out << "trial_id,split,true_label,predicted\n";
  for (const auto& o : result.per_trial) {
    out << o.trial_id << ',' << split_name(o.split) << ',' << static_cast<int>(o.true_label) << ','
        << static_cast<int>(o.predicted) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const ExperimentResult& result) {
  BandRequest request{result.band.mode, result.band.cutoff};
  std::ostringstream hash;
  hash << std::hex << result.config_hash;
  out << "subject,band,band_first,band_last,train_accuracy,test_accuracy,config_hash\n"
      << result.subject << ',' << to_string(request) << ',' << result.band.first << ','
      << result.band.last << ',' << format_exact(result.train_accuracy) << ','
      << format_exact(result.test_accuracy) << ',' << hash.str() << '\n';
}

std::pair<double, double> mean_and_std(std::span<const double> values) {
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

std::pair<double, double> TableResult::row_stats(std::size_t band_index) const {
  std::vector<double> ok;
  for (const auto& cell : accuracy.at(band_index)) {
    if (cell && !std::isnan(*cell)) ok.push_back(*cell);
  }
  return mean_and_std(ok);
}

TableResult run_table(const ExperimentConfig& base, std::span<const std::string> subjects,
                      std::span<const BandRequest> bands) {
  TableResult table;
  table.subjects.assign(subjects.begin(), subjects.end());
  table.bands.assign(bands.begin(), bands.end());
  table.accuracy.assign(bands.size(), std::vector<std::optional<double>>(subjects.size()));

  for (std::size_t s = 0; s < subjects.size(); ++s) {
    ExperimentConfig config = base;
    config.subject = subjects[s];
    std::optional<PreparedSubject> prepared;
    try {
      config.validate();
      prepared = prepare_subject(
          stage("loading", [&] { return read_recording(config.data_dir, config.subject); }),
          config);
    } catch (const Error& e) {
      for (const auto& band : bands) table.failures.push_back({subjects[s], band, e.code(), e.what()});
      continue;
    }
    for (std::size_t b = 0; b < bands.size(); ++b) {
      config.band = bands[b];
      try {
        const ExperimentResult r =
            classify_trials(prepared->train, prepared->test, prepared->spectrum, config);
        table.accuracy[b][s] = r.test_accuracy;
      } catch (const Error& e) {
        table.failures.push_back({subjects[s], bands[b], e.code(), e.what()});
      }
    }
  }
  return table;
}

void write_table_csv(std::ostream& out, const TableResult& table) {
  out << "band";
  for (const auto& s : table.subjects) out << ',' << s;
  out << ",mean,std\n";
  for (std::size_t b = 0; b < table.bands.size(); ++b) {
    out << to_string(table.bands[b]);
    for (const auto& cell : table.accuracy[b]) {
      out << ',' << (cell ? format_fixed(100.0 * *cell, 4) : std::string("NA"));
    }
    const auto [mean, sd] = table.row_stats(b);
    out << ',' << format_fixed(100.0 * mean, 4) << ',' << format_fixed(100.0 * sd, 4) << '\n';
  }
}

}  // namespace gfsub
