// gfsub: graph Fourier discriminative-subspace classification of two-class
// multichannel trials.
//
// Exit codes: 0 success, 1 validation error, 2 numeric failure, 3 I/O error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gfsub/classifier.hpp"
#include "gfsub/cv.hpp"
#include "gfsub/error.hpp"
#include "gfsub/format.hpp"
#include "gfsub/graph.hpp"
#include "gfsub/pipeline.hpp"
#include "gfsub/recording_io.hpp"
#include "gfsub/subspace.hpp"
#include "gfsub/synthetic.hpp"

namespace fs = std::filesystem;
using namespace gfsub;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "error writing " + path.string());
}

fs::path sibling(const fs::path& path, const std::string& suffix) {
  fs::path out = path;
  out.replace_filename(path.stem().string() + suffix);
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

struct CommonOptions {
  std::string data_dir;
  std::string subject;
  std::size_t folds = 10;
  std::uint64_t seed = 42;
  std::size_t rows_per_end = 1;
  double margin_cost = 1.0;
  bool log_features = false;
  bool standardize = false;
  bool allow_rank_reduction = false;
  std::string filter_scope = "recording";
  bool zero_phase = false;
};

void add_model_flags(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Fold assignment seed")->capture_default_str();
  cmd->add_option("--rows-per-end", o.rows_per_end, "Projector rows taken from each end")
      ->capture_default_str();
  cmd->add_option("--c", o.margin_cost, "SVM soft-margin cost")->capture_default_str();
  cmd->add_flag("--log-features", o.log_features, "Use log-variance features");
  cmd->add_flag("--standardize", o.standardize, "Standardize features on the training set");
  cmd->add_flag("--allow-rank-reduction", o.allow_rank_reduction,
                "Drop rank-deficient directions instead of failing");
  cmd->add_option("--filter-scope", o.filter_scope, "Filter the whole recording or each epoch")
      ->check(CLI::IsMember({"recording", "epoch"}))
      ->capture_default_str();
  cmd->add_flag("--zero-phase", o.zero_phase, "Forward-backward filtering");
}

ExperimentConfig make_config(const CommonOptions& o) {
  ExperimentConfig c;
  c.data_dir = o.data_dir;
  c.subject = o.subject;
  c.folds = o.folds;
  c.seed = o.seed;
  c.rows_per_end = o.rows_per_end;
  c.margin_cost = o.margin_cost;
  c.log_features = o.log_features;
  c.standardize = o.standardize;
  c.allow_rank_reduction = o.allow_rank_reduction;
  c.filter_scope = o.filter_scope == "epoch" ? FilterScope::Epoch : FilterScope::Recording;
  c.filter_phase = o.zero_phase ? FilterPhase::ZeroPhase : FilterPhase::Causal;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph Fourier discriminative-subspace classifier"};
  app.require_subcommand(1);

  CommonOptions opts;

  auto* run = app.add_subcommand("run", "Train on the training split and score the test split");
  std::string band_text;
  std::string out_path = "results.csv";
  std::string model_path, projector_path;
  run->add_option("--data", opts.data_dir, "Dataset directory")->required();
  run->add_option("--subject", opts.subject, "Subject name")->required();
  run->add_option("--band", band_text, "all | lf | mf | hf | fixed:<k> | ss")->required();
  run->add_option("--out", out_path, "Per-trial CSV; a .summary.csv sibling is also written")
      ->capture_default_str();
  run->add_option("--export-model", model_path, "Write the linear model as text");
  run->add_option("--export-projector", projector_path, "Write P_hat as CSV (theta1 as sibling)");
  add_model_flags(run, opts);

  auto* scan = app.add_subcommand("scan", "Cross-validated accuracy for every cutoff");
  std::string scan_out;
  scan->add_option("--data", opts.data_dir, "Dataset directory")->required();
  scan->add_option("--subject", opts.subject, "Subject name")->required();
  scan->add_option("--out", scan_out, "Curve CSV")->required();
  add_model_flags(scan, opts);

  auto* table = app.add_subcommand("table", "Test accuracy grid over subjects and bands");
  std::string subjects_text, bands_text, table_out;
  table->add_option("--data", opts.data_dir, "Dataset directory")->required();
  table->add_option("--subjects", subjects_text, "Comma-separated subjects")->required();
  table->add_option("--bands", bands_text, "Comma-separated bands")->required();
  table->add_option("--out", table_out, "Table CSV")->required();
  add_model_flags(table, opts);

  auto* synth = app.add_subcommand("synth", "Write a planted two-class dataset");
  SyntheticSpec synth_spec;
  std::string synth_out, synth_name = "synth";
  synth->add_option("--seed", synth_spec.seed, "Generator seed")->required();
  synth->add_option("--channels", synth_spec.channels, "Electrodes")->required();
  synth->add_option("--trials", synth_spec.trials_per_class, "Trials per class")->required();
  synth->add_option("--separation", synth_spec.separation, "Class signal amplitude")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--name", synth_name, "Subject name of the written files")
      ->capture_default_str();
  synth->add_option("--train-fraction", synth_spec.train_fraction, "Training share per class")
      ->capture_default_str();

  auto* graph = app.add_subcommand("export-graph", "Write the training-set connectivity graph");
  std::string graph_out, eig_out;
  graph->add_option("--data", opts.data_dir, "Dataset directory")->required();
  graph->add_option("--subject", opts.subject, "Subject name")->required();
  graph->add_option("--out", graph_out, "Adjacency CSV")->required();
  graph->add_option("--eigenvalues", eig_out, "Laplacian eigenvalues CSV");
  graph->add_option("--filter-scope", opts.filter_scope, "recording | epoch")
      ->check(CLI::IsMember({"recording", "epoch"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) {
      ExperimentConfig config = make_config(opts);
      config.band = parse_band(band_text);
      const ExperimentResult result = run_experiment(config);

      const fs::path out(out_path);
      auto trials = open_out(out);
      write_trials_csv(trials, result);
      finish(trials, out);
      const fs::path summary_path = sibling(out, ".summary.csv");
      auto summary = open_out(summary_path);
      write_summary_csv(summary, result);
      finish(summary, summary_path);
      if (!model_path.empty()) {
        auto m = open_out(model_path);
        write_model(m, result.model.classifier);
        finish(m, model_path);
      }
      if (!projector_path.empty()) {
        const fs::path p(projector_path);
        auto f = open_out(p);
        write_projector_csv(f, result.model.projector);
        finish(f, p);
        const fs::path theta_path = sibling(p, ".theta.csv");
        auto t = open_out(theta_path);
        write_theta_csv(t, result.model.projector);
        finish(t, theta_path);
      }
      std::cout << result.subject << " band [" << result.band.first << ", " << result.band.last
                << "] train " << format_fixed(100.0 * result.train_accuracy, 2) << "% test "
                << format_fixed(100.0 * result.test_accuracy, 2) << "%\n";
    } else if (scan->parsed()) {
      const ExperimentConfig config = make_config(opts);
      config.validate();
      const Recording rec = read_recording(config.data_dir, config.subject);
      const PreparedSubject prepared = prepare_subject(rec, config);
      CvOptions cv;
      cv.folds = config.folds;
      cv.seed = config.seed;
      cv.fit = config.fit_options();
      const CvReport report = cv_scan(prepared.train, prepared.spectrum, cv);
      const fs::path out(scan_out);
      auto f = open_out(out);
      write_cv_csv(f, report);
      finish(f, out);
      std::cout << config.subject << " best cutoff " << report.best_cutoff << " ("
                << format_fixed(100.0 * report.accuracies.at(report.best_cutoff), 2) << "%)\n";
    } else if (table->parsed()) {
      const ExperimentConfig config = make_config(opts);
      const std::vector<std::string> subjects = split_list(subjects_text);
      std::vector<BandRequest> bands;
      for (const auto& b : split_list(bands_text)) bands.push_back(parse_band(b));
      if (subjects.empty() || bands.empty()) {
        throw Error(ErrorCode::ConfigInvalid, "need at least one subject and one band");
      }
      const TableResult result = run_table(config, subjects, bands);
      const fs::path out(table_out);
      auto f = open_out(out);
      write_table_csv(f, result);
      finish(f, out);
      for (const auto& fail : result.failures) {
        std::cerr << "failed cell (" << fail.subject << ", " << to_string(fail.band)
                  << "): " << fail.message << '\n';
      }
      if (!result.failures.empty()) {
        return exit_code_for(category_of(result.failures.front().code));
      }
    } else if (synth->parsed()) {
      write_synthetic(synth_out, synth_name, synth_spec);
    } else if (graph->parsed()) {
      const ExperimentConfig config = make_config(opts);
      const Recording rec = read_recording(config.data_dir, config.subject);
      const PreparedSubject prepared = prepare_subject(rec, config);
      const fs::path out(graph_out);
      auto f = open_out(out);
      write_adjacency_csv(f, prepared.graph);
      finish(f, out);
      if (!eig_out.empty()) {
        auto e = open_out(eig_out);
        write_eigenvalues_csv(e, prepared.spectrum);
        finish(e, eig_out);
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
