#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eegml0/dataset.hpp"
#include "eegml0/optimizer.hpp"

namespace eegml0::bench {

// The seven benchmarked configurations: entropy + smoothing l0 (one of the
// four variants), plain entropy, squared error + L2, plain squared error.
struct MethodConfig {
  enum class Family { eegml0, eegm, sgm_l2, sgm };
  Family family = Family::eegml0;
  RegVariant variant = RegVariant::reg1;  // eegml0 only
  double sigma = 1.0;
  double lambda = 1e-4;  // penalty weight (eegml0) or L2 coefficient (sgm_l2)
  double learning_rate = 1e-3;
  long epochs = 15000;
  BatchPolicy batch;  // full batch by default

  LossKind to_loss_kind() const;
  std::string label() const;  // "eegml0-reg1", "eegm", "sgm-l2", "sgm"
  static std::optional<MethodConfig> parse(const std::string& token);
  static std::vector<MethodConfig> all_seven();
};

struct ConfusionCounts {
  long tp = 0, tn = 0, fp = 0, fn = 0;
  long total() const { return tp + tn + fp + fn; }
  double accuracy() const {
    return total() == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(total());
  }
};

// Thresholded confusion counts; ties at the threshold classify as positive.
// The evaluation set must carry 0/1 labels.
ConfusionCounts evaluate(std::span<const double> w, const Dataset& data,
                         double threshold = 0.5);

struct ExperimentOptions {
  long trials = 20;
  std::uint64_t seed_base = 1;
  double train_fraction = 0.7;
  bool stratified = true;
  bool fixed_split = false;  // one split for all trials instead of per-trial reseeding
  NormalizeMode normalize = NormalizeMode::min_max;
  bool add_bias = true;
  long eval_every = 1;
  bool parallel_trials = true;
};

struct ExperimentResult {
  std::string dataset;
  std::string method;
  std::vector<double> trial_accuracies;  // NaN for failed trials
  std::vector<std::string> trial_errors;  // empty string for clean trials
  double mean = 0.0;
  double stddev = 0.0;
  long trials_requested = 0;
  long trials_failed = 0;
  std::size_t rows = 0;      // actual J of the loaded dataset
  std::size_t features = 0;  // actual p
};

// Trial k: split with seed_base + k (unless fixed_split), min-max fit on the
// training part only, optional bias column, init seeded with seed_base + k,
// train, score the final weights on the validation part. Failing trials are
// recorded and excluded from the mean; all trials failing is an error.
// `trace0` (optional) receives trial 0's trace for plot emission.
ExperimentResult run_experiment(const MethodConfig& method, const Dataset& data,
                                const ExperimentOptions& options,
                                TrainTrace* trace0 = nullptr);

struct SuiteOptions {
  std::vector<MethodConfig> methods;  // empty -> all seven
  ExperimentOptions experiment;
  bool emit_plots = false;
};

struct SuiteResult {
  std::vector<ExperimentResult> cells;
  std::filesystem::path results_file;
  std::filesystem::path table_file;
  double max_cell_seconds = 0.0;
  double total_seconds = 0.0;
};

// Runs every dataset x method cell, honoring per-dataset epoch overrides from
// the manifest, and writes results.txt (machine readable, byte-stable given
// manifest bytes and seed_base) plus results_table.txt (rendered grid, best
// method per dataset marked '*'). Per-cell failures are recorded and the
// suite continues.
SuiteResult run_suite(const std::vector<ManifestEntry>& manifest, const SuiteOptions& options,
                      const std::filesystem::path& out_dir);

void write_results_file(const std::filesystem::path& path,
                        const std::vector<ExperimentResult>& cells);
std::string render_table(const std::vector<ExperimentResult>& cells);

// Per-dataset plot data: three columnar files (train loss, validation loss,
// validation accuracy against epoch), one column per method series. Files
// whose series are entirely absent (no validation set) are skipped with a
// notice in the returned list.
struct PlotEmission {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> notices;
};
PlotEmission emit_plot_data(const std::string& dataset,
                            const std::vector<std::pair<std::string, const TrainTrace*>>& series,
                            const std::filesystem::path& out_dir);

}  // namespace eegml0::bench
