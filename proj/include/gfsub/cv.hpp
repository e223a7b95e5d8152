#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "gfsub/band.hpp"
#include "gfsub/graph.hpp"
#include "gfsub/model.hpp"
#include "gfsub/subspace.hpp"

namespace gfsub {

struct CvOptions {
  std::size_t folds = 10;
  std::uint64_t seed = 42;
  std::size_t cutoff_first = 2;
  std::size_t cutoff_last = 0;  // 0 means N
  FitOptions fit;
  unsigned threads = 0;  // 0 means hardware concurrency
};

struct CvReport {
  std::map<std::size_t, double> accuracies;  // cutoff -> mean fold accuracy
  std::size_t best_cutoff = 0;               // argmax, smallest cutoff on ties
  std::size_t folds = 0;
  std::uint64_t seed = 0;
};

/// Stratified fold index per trial, a pure function of (seed, trial_id, label).
/// Within each class, trials are ordered by a hashed key and dealt round-robin;
/// class 2 continues where class 1 stopped so small classes do not leave folds
/// empty. Unlabeled trials get `folds` (no fold).
std::vector<std::size_t> stratified_folds(std::span<const SpectralTrial> trials, std::size_t folds,
                                          std::uint64_t seed);

/// For every cutoff k, k-fold CV of the full model on band [1, k]; each fold
/// refits covariances, projector and classifier on its training part only.
/// `trials` are full-band normalized training trials. Throws TooFewTrials; fold
/// failures are rethrown with the (cutoff, fold) attached.
CvReport cv_scan(std::span<const SpectralTrial> trials, const CvOptions& options = {});

/// Normalizes the trials against `spec` first.
CvReport cv_scan(std::span<const TrialMatrix> trials, const GraphSpectrum& spec,
                 const CvOptions& options = {});

/// Band [1, best_cutoff].
SpectralBand select_subject_specific(const CvReport& report);

/// Header `cutoff,mean_accuracy`, one row per scanned cutoff.
void write_cv_csv(std::ostream& out, const CvReport& report);

}  // namespace gfsub
