#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfsub/band.hpp"
#include "gfsub/cv.hpp"
#include "gfsub/error.hpp"
#include "gfsub/graph.hpp"
#include "gfsub/model.hpp"
#include "gfsub/signal.hpp"

namespace gfsub {

enum class FilterScope { Recording, Epoch };

struct ExperimentConfig {
  std::filesystem::path data_dir;
  std::string subject;
  BandRequest band;
  std::size_t rows_per_end = 1;
  double margin_cost = 1.0;
  std::size_t folds = 10;
  std::uint64_t seed = 42;
  BandPassSpec filter;  // 8-30 Hz, order 3
  EpochWindow epoch;    // 0.5 s + 2.0 s after the cue
  FilterScope filter_scope = FilterScope::Recording;
  FilterPhase filter_phase = FilterPhase::Causal;
  bool log_features = false;
  bool standardize = false;
  bool allow_rank_reduction = false;
  double rank_tol = 1e-10;

  /// Throws ConfigInvalid.
  void validate() const;
  FitOptions fit_options() const;
};

/// FNV-1a digest of every field that influences the result.
std::uint64_t config_hash(const ExperimentConfig& config);

struct TrialOutcome {
  std::size_t trial_id = 0;
  Split split = Split::Train;
  Label true_label = Label::Unlabeled;
  Label predicted = Label::Unlabeled;
};

struct ExperimentResult {
  std::string subject;
  SpectralBand band;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;  // NaN when no test trial carries a label
  std::vector<TrialOutcome> per_trial;
  std::uint64_t config_hash = 0;
  std::optional<CvReport> scan;  // subject-specific band only
  SubspaceModel model;
};

/// Filtered, epoched trials of one subject and the graph built from its training part.
struct PreparedSubject {
  std::vector<TrialMatrix> train;
  std::vector<TrialMatrix> test;
  ConnectivityGraph graph;
  GraphSpectrum spectrum;
};

PreparedSubject prepare_subject(const Recording& recording, const ExperimentConfig& config);

/// Normalize, pick the band (scanning for `ss`), fit on `train`, predict both splits.
ExperimentResult classify_trials(std::span<const TrialMatrix> train,
                                 std::span<const TrialMatrix> test, const GraphSpectrum& spectrum,
                                 const ExperimentConfig& config);

ExperimentResult run_experiment(const Recording& recording, const ExperimentConfig& config);

/// Loads `<data_dir>/<subject>.*` and runs the full protocol. Module errors are
/// rethrown with the pipeline stage prepended.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Header `trial_id,split,true_label,predicted`.
void write_trials_csv(std::ostream& out, const ExperimentResult& result);

/// Header `subject,band,band_first,band_last,train_accuracy,test_accuracy,config_hash`.
void write_summary_csv(std::ostream& out, const ExperimentResult& result);

struct TableFailure {
  std::string subject;
  BandRequest band;
  ErrorCode code;
  std::string message;
};

struct TableResult {
  std::vector<std::string> subjects;
  std::vector<BandRequest> bands;
  std::vector<std::vector<std::optional<double>>> accuracy;  // [band][subject], test fraction
  std::vector<TableFailure> failures;

  /// Mean and sample standard deviation (n - 1; 0 for a single value) of the
  /// successful cells of a row.
  std::pair<double, double> row_stats(std::size_t band_index) const;
};

/// Every (band, subject) cell runs independently; failures are collected, not thrown.
TableResult run_table(const ExperimentConfig& base, std::span<const std::string> subjects,
                      std::span<const BandRequest> bands);

/// Header `band,<subjects...>,mean,std`; percentages with 4 decimals, `NA` for failed cells.
void write_table_csv(std::ostream& out, const TableResult& table);

/// Mean and sample standard deviation.
std::pair<double, double> mean_and_std(std::span<const double> values);

}  // namespace gfsub
