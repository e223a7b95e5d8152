#include "gfsub/cv.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <thread>

#include "gfsub/error.hpp"
#include "gfsub/format.hpp"

namespace gfsub {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double fold_accuracy(std::span<const SpectralTrial> trials, std::span<const std::size_t> fold_of,
                     std::size_t fold, const SpectralBand& band, const FitOptions& fit) {
  std::vector<SpectralTrial> train;
  std::vector<const SpectralTrial*> held_out;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (!is_labeled(trials[i].label)) continue;
    if (fold_of[i] == fold) {
      held_out.push_back(&trials[i]);
    } else {
      train.push_back(trials[i]);
    }
  }
  const SubspaceModel model = fit_subspace_model(train, band, fit);
  std::size_t correct = 0;
  for (const auto* st : held_out) {
    if (model.predict(*st) == st->label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(held_out.size());
}

}  // namespace

std::vector<std::size_t> stratified_folds(std::span<const SpectralTrial> trials, std::size_t folds,
                                          std::uint64_t seed) {
  std::vector<std::size_t> fold_of(trials.size(), folds);
  std::size_t next = 0;
  for (Label cls : {Label::Class1, Label::Class2}) {
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;  // (key, index)
    for (std::size_t i = 0; i < trials.size(); ++i) {
      if (trials[i].label != cls) continue;
      const std::uint64_t key =
          splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(trials[i].trial_id) * 2u +
                                       (cls == Label::Class1 ? 0u : 1u)));
      keyed.emplace_back(key, i);
    }
    std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return trials[a.second].trial_id < trials[b.second].trial_id;
    });
    for (const auto& [key, i] : keyed) {
      fold_of[i] = next % folds;
      ++next;
    }
  }
  return fold_of;
}

CvReport cv_scan(std::span<const SpectralTrial> trials, const CvOptions& options) {
  if (options.folds < 2) throw Error(ErrorCode::TooFewTrials, "need at least 2 folds");
  if (trials.empty()) throw Error(ErrorCode::TooFewTrials, "no training trials");

  std::size_t k1 = 0, k2 = 0;
  for (const auto& st : trials) {
    k1 += st.label == Label::Class1;
    k2 += st.label == Label::Class2;
  }
  if (k1 < 2 || k2 < 2 || k1 + k2 < options.folds) {
    throw Error(ErrorCode::TooFewTrials,
                std::to_string(k1) + " class-1 and " + std::to_string(k2) +
                    " class-2 trials cannot fill " + std::to_string(options.folds) +
                    " folds (need >= 2 per class and >= 1 per fold)");
  }

  const std::size_t n = trials.front().band.last;
  for (const auto& st : trials) {
    if (st.band.first != 1 || st.band.last != n) {
      throw Error(ErrorCode::DimensionMismatch, "cv_scan expects full-band spectral trials",
                  {st.trial_id});
    }
  }
  const std::size_t lo = options.cutoff_first;
  const std::size_t hi = options.cutoff_last == 0 ? n : options.cutoff_last;
  if (lo < 1 || lo > hi || hi > n) {
    throw Error(ErrorCode::BadCutoff, "cutoff range [" + std::to_string(lo) + ", " +
                                          std::to_string(hi) + "] not inside [1, " +
                                          std::to_string(n) + "]");
  }

  const std::vector<std::size_t> fold_of = stratified_folds(trials, options.folds, options.seed);

  const std::size_t count = hi - lo + 1;
  std::vector<double> accuracy(count, 0.0);
  std::vector<std::optional<Error>> failures(count);
  std::vector<std::exception_ptr> foreign(count);

  auto evaluate = [&](std::size_t slot) {
    const std::size_t cutoff = lo + slot;
    const SpectralBand band = resolve_band(BandMode::FixedCutoff, cutoff, n);
    double sum = 0.0;
    for (std::size_t f = 0; f < options.folds; ++f) {
      try {
        sum += fold_accuracy(trials, fold_of, f, band, options.fit);
      } catch (const Error& e) {
        failures[slot] = e.with_context("cutoff " + std::to_string(cutoff) + ", fold " +
                                        std::to_string(f));
        return;
      } catch (...) {
        foreign[slot] = std::current_exception();
        return;
      }
    }
    accuracy[slot] = sum / static_cast<double>(options.folds);
  };

  unsigned workers = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, count));
  if (workers == 1) {
    for (std::size_t s = 0; s < count; ++s) evaluate(s);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t s = next++; s < count; s = next++) evaluate(s);
      });
    }
  }

  for (std::size_t s = 0; s < count; ++s) {
    if (foreign[s]) std::rethrow_exception(foreign[s]);
    if (failures[s]) throw *failures[s];
  }

  CvReport report;
  report.folds = options.folds;
  report.seed = options.seed;
  double best = -1.0;
  for (std::size_t s = 0; s < count; ++s) {
    report.accuracies.emplace(lo + s, accuracy[s]);
    if (accuracy[s] > best) {
      best = accuracy[s];
      report.best_cutoff = lo + s;
    }
  }
  return report;
}

CvReport cv_scan(std::span<const TrialMatrix> trials, const GraphSpectrum& spec,
                 const CvOptions& options) {
  std::vector<SpectralTrial> normalized;
  normalized.reserve(trials.size());
  for (const auto& t : trials) normalized.push_back(normalize_trial(t, spec));
  return cv_scan(normalized, options);
}

SpectralBand select_subject_specific(const CvReport& report) {
  if (report.accuracies.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "empty cross-validation report");
  }
  // Recomputed from the table so hand-built reports follow the same tie rule.
  std::size_t best_cutoff = 0;
  double best = -1.0;
  for (const auto& [cutoff, acc] : report.accuracies) {
    if (acc > best) {
      best = acc;
      best_cutoff = cutoff;
    }
  }
  SpectralBand band;
  band.mode = BandMode::SubjectSpecific;
  band.cutoff = best_cutoff;
  band.first = 1;
  band.last = best_cutoff;
  return band;
}

void write_cv_csv(std::ostream& out, const CvReport& report) {
  out << "cutoff,mean_accuracy\n";
  for (const auto& [cutoff, acc] : report.accuracies) {
    out << cutoff << ',' << format_exact(acc) << '\n';
  }
}

}  // namespace gfsub
