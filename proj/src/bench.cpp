#include "eegml0/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eegml0/kernels.hpp"

namespace eegml0::bench {

LossKind MethodConfig::to_loss_kind() const {
  switch (family) {
    case Family::eegml0:
      return LossKind::entropy_smoothed_l0({variant, sigma, lambda});
    case Family::eegm:
      return LossKind::plain_entropy();
    case Family::sgm_l2:
      return LossKind::squared_l2(lambda);
    case Family::sgm:
      return LossKind::plain_squared();
  }
  return {};
}

std::string MethodConfig::label() const {
  switch (family) {
    case Family::eegml0: return std::string("eegml0-") + to_string(variant);
    case Family::eegm: return "eegm";
    case Family::sgm_l2: return "sgm-l2";
    case Family::sgm: return "sgm";
  }
  return "?";
}

std::optional<MethodConfig> MethodConfig::parse(const std::string& token) {
  MethodConfig m;
  if (token == "eegm") {
    m.family = Family::eegm;
  } else if (token == "sgm-l2" || token == "sgm_l2") {
    m.family = Family::sgm_l2;
  } else if (token == "sgm") {
    m.family = Family::sgm;
  } else if (token.rfind("eegml0", 0) == 0) {
    m.family = Family::eegml0;
    const std::string rest = token.size() > 6 ? token.substr(7) : "";
    if (token.size() > 6 && (token[6] != '-' && token[6] != '+')) return std::nullopt;
    if (rest == "reg1" || rest.empty()) m.variant = RegVariant::reg1;
    else if (rest == "reg2") m.variant = RegVariant::reg2;
    else if (rest == "reg3") m.variant = RegVariant::reg3;
    else if (rest == "reg4") m.variant = RegVariant::reg4;
    else return std::nullopt;
  } else {
    return std::nullopt;
  }
  return m;
}

std::vector<MethodConfig> MethodConfig::all_seven() {
  std::vector<MethodConfig> all;
  for (RegVariant v :
       {RegVariant::reg1, RegVariant::reg2, RegVariant::reg3, RegVariant::reg4}) {
    MethodConfig m;
    m.family = Family::eegml0;
    m.variant = v;
    all.push_back(m);
  }
  MethodConfig eegm;
  eegm.family = Family::eegm;
  all.push_back(eegm);
  MethodConfig sgml2;
  sgml2.family = Family::sgm_l2;
  all.push_back(sgml2);
  MethodConfig sgm;
  sgm.family = Family::sgm;
  all.push_back(sgm);
  return all;
}

ConfusionCounts evaluate(std::span<const double> w, const Dataset& data, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("evaluate: threshold must be in (0, 1)");
  if (!data.labels_binary())
    throw std::invalid_argument("evaluate: evaluation set must have 0/1 labels");
  const kernels::Confusion c = kernels::confusion_counts(kernels::view_of(data), w, threshold);
  return {c.tp, c.tn, c.fp, c.fn};
}

namespace {

struct TrialResult {
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

TrialResult run_trial(const MethodConfig& method, const Dataset& data,
                      const ExperimentOptions& options, long trial, TrainTrace* trace_out) {
  TrialResult out;
  try {
    const std::uint64_t seed = options.seed_base + static_cast<std::uint64_t>(trial);
    SplitSpec split_spec;
    split_spec.train_fraction = options.train_fraction;
    split_spec.seed = options.fixed_split ? options.seed_base : seed;
    split_spec.stratified = options.stratified;
    auto [train_raw, val_raw] = split(data, split_spec);

    auto [train_set, params] = normalize(train_raw, options.normalize);
    Dataset val_set = apply_normalization(val_raw, params);
    if (options.add_bias) {
      train_set = augment_bias(train_set);
      val_set = augment_bias(val_set);
    }

    TrainConfig config;
    config.policy = StepPolicy::manual(method.learning_rate);
    config.epochs = method.epochs;
    config.batch = method.batch;
    config.seed = seed;
    config.init_scale = 0.5;
    config.loss = method.to_loss_kind();
    config.eval_every = trace_out != nullptr ? 1 : options.eval_every;

    TrainTrace trace = train(config, train_set, &val_set);
    out.accuracy = evaluate(trace.final_weights, val_set).accuracy();
    if (trace_out != nullptr) *trace_out = std::move(trace);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const MethodConfig& method, const Dataset& data,
                                const ExperimentOptions& options, TrainTrace* trace0) {
  if (options.trials < 1) throw std::invalid_argument("run_experiment: trials must be >= 1");

  ExperimentResult result;
  result.dataset = data.name();
  result.method = method.label();
  result.trials_requested = options.trials;
  result.rows = data.size();
  result.features = data.dim();
  result.trial_accuracies.assign(static_cast<std::size_t>(options.trials),
                                 std::numeric_limits<double>::quiet_NaN());
  result.trial_errors.assign(static_cast<std::size_t>(options.trials), "");

  // Trials are independent; outcomes land in per-trial slots and the
  // aggregation below runs in trial order, so the result does not depend on
  // scheduling.
#pragma omp parallel for schedule(dynamic) if (options.parallel_trials)
  for (long k = 0; k < options.trials; ++k) {
    const TrialResult tr =
        run_trial(method, data, options, k, k == 0 ? trace0 : nullptr);
    result.trial_accuracies[static_cast<std::size_t>(k)] = tr.accuracy;
    result.trial_errors[static_cast<std::size_t>(k)] = tr.error;
  }

  double sum = 0.0;
  long ok = 0;
  for (long k = 0; k < options.trials; ++k) {
    if (result.trial_errors[static_cast<std::size_t>(k)].empty()) {
      sum += result.trial_accuracies[static_cast<std::size_t>(k)];
      ++ok;
    } else {
      ++result.trials_failed;
    }
  }
  if (ok == 0)
    throw std::runtime_error("run_experiment: every trial failed (" + result.dataset + ", " +
                             result.method + "): " + result.trial_errors.front());
  result.mean = sum / static_cast<double>(ok);
  double ss = 0.0;
  for (long k = 0; k < options.trials; ++k)
    if (result.trial_errors[static_cast<std::size_t>(k)].empty()) {
      const double d = result.trial_accuracies[static_cast<std::size_t>(k)] - result.mean;
      ss += d * d;
    }
  result.stddev = ok > 1 ? std::sqrt(ss / static_cast<double>(ok - 1)) : 0.0;
  return result;
}

namespace {

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void write_results_file(const std::filesystem::path& path,
                        const std::vector<ExperimentResult>& cells) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write results " + path.string());
  out << "# eegml0 suite results\n";
  out << "# fields: dataset method mean std trials J p\n";
  for (const ExperimentResult& c : cells) {
    out << "dataset=" << c.dataset << " method=" << c.method << " mean=" << fmt6(c.mean)
        << " std=" << fmt6(c.stddev) << " trials=" << (c.trials_requested - c.trials_failed)
        << " J=" << c.rows << " p=" << c.features << "\n";
  }
}

std::string render_table(const std::vector<ExperimentResult>& cells) {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  for (const ExperimentResult& c : cells) {
    if (std::find(datasets.begin(), datasets.end(), c.dataset) == datasets.end())
      datasets.push_back(c.dataset);
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end())
      methods.push_back(c.method);
  }

  auto cell_of = [&](const std::string& d, const std::string& m) -> const ExperimentResult* {
    for (const ExperimentResult& c : cells)
      if (c.dataset == d && c.method == m) return &c;
    return nullptr;
  };

  std::size_t name_width = 7;
  for (const std::string& d : datasets) name_width = std::max(name_width, d.size());

  std::ostringstream out;
  out << "Mean validation accuracy (%), best per dataset marked *\n\n";
  out << std::string(name_width, ' ');
  for (const std::string& m : methods) {
    out << "  ";
    out.width(12);
    out << m;
  }
  out << "\n";

  for (const std::string& d : datasets) {
    double best = -1.0;
    for (const std::string& m : methods)
      if (const ExperimentResult* c = cell_of(d, m)) best = std::max(best, c->mean);
    out.width(static_cast<std::streamsize>(name_width));
    out << d;
    for (const std::string& m : methods) {
      const ExperimentResult* c = cell_of(d, m);
      char buf[32];
      if (c == nullptr) {
        std::snprintf(buf, sizeof(buf), "%12s", "-");
      } else {
        std::snprintf(buf, sizeof(buf), "%11.2f%c", 100.0 * c->mean,
                      c->mean == best ? '*' : ' ');
      }
      out << "  " << buf;
    }
    out << "\n";
  }
  return out.str();
}

SuiteResult run_suite(const std::vector<ManifestEntry>& manifest, const SuiteOptions& options,
                      const std::filesystem::path& out_dir) {
  if (manifest.empty()) throw std::invalid_argument("run_suite: empty manifest");
  std::filesystem::create_directories(out_dir);
  const std::vector<MethodConfig> methods =
      options.methods.empty() ? MethodConfig::all_seven() : options.methods;

  SuiteResult suite;
  const auto t_start = std::chrono::steady_clock::now();

  for (const ManifestEntry& entry : manifest) {
    Dataset data;
    try {
      CsvOptions csv;
      csv.label_column = entry.label_column;
      data = load_csv(entry.path, csv);
      data.set_name(entry.name);
    } catch (const std::exception& e) {
      for (const MethodConfig& base : methods) {
        ExperimentResult failed;
        failed.dataset = entry.name;
        failed.method = base.label();
        failed.trials_requested = options.experiment.trials;
        failed.trials_failed = options.experiment.trials;
        failed.mean = std::numeric_limits<double>::quiet_NaN();
        failed.trial_errors.assign(1, e.what());
        suite.cells.push_back(std::move(failed));
      }
      continue;
    }

    std::vector<std::pair<std::string, TrainTrace>> plot_traces;
    for (const MethodConfig& base : methods) {
      MethodConfig method = base;
      if (entry.epochs_override.has_value()) method.epochs = *entry.epochs_override;

      const auto t0 = std::chrono::steady_clock::now();
      TrainTrace trace0;
      try {
        ExperimentResult cell = run_experiment(method, data, options.experiment,
                                               options.emit_plots ? &trace0 : nullptr);
        suite.cells.push_back(std::move(cell));
        if (options.emit_plots) plot_traces.emplace_back(method.label(), std::move(trace0));
      } catch (const std::exception& e) {
        ExperimentResult failed;
        failed.dataset = entry.name;
        failed.method = method.label();
        failed.trials_requested = options.experiment.trials;
        failed.trials_failed = options.experiment.trials;
        failed.mean = std::numeric_limits<double>::quiet_NaN();
        failed.trial_errors.assign(1, e.what());
        suite.cells.push_back(std::move(failed));
      }
      const auto t1 = std::chrono::steady_clock::now();
      suite.max_cell_seconds = std::max(
          suite.max_cell_seconds, std::chrono::duration<double>(t1 - t0).count());
    }

    if (options.emit_plots && !plot_traces.empty()) {
      std::vector<std::pair<std::string, const TrainTrace*>> series;
      for (const auto& [label, trace] : plot_traces) series.emplace_back(label, &trace);
      emit_plot_data(entry.name, series, out_dir);
    }
  }

  suite.total_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  suite.results_file = out_dir / "results.txt";
  suite.table_file = out_dir / "results_table.txt";
  write_results_file(suite.results_file, suite.cells);
  std::ofstream table(suite.table_file);
  if (!table) throw std::runtime_error("cannot write " + suite.table_file.string());
  table << render_table(suite.cells);
  return suite;
}

PlotEmission emit_plot_data(const std::string& dataset,
                            const std::vector<std::pair<std::string, const TrainTrace*>>& series,
                            const std::filesystem::path& out_dir) {
  if (series.empty()) throw std::invalid_argument("emit_plot_data: no traces");
  std::filesystem::create_directories(out_dir);
  PlotEmission emission;

  std::size_t epochs = 0;
  for (const auto& [label, trace] : series)
    epochs = std::max(epochs, trace->epochs.size());

  struct Column {
    const char* suffix;
    double EpochMetrics::*field;
  };
  static constexpr Column kColumns[] = {
      {"train_loss", &EpochMetrics::train_loss},
      {"val_loss", &EpochMetrics::val_loss},
      {"val_accuracy", &EpochMetrics::val_accuracy},
  };

  for (const Column& col : kColumns) {
    bool any = false;
    for (const auto& [label, trace] : series)
      for (const EpochMetrics& em : trace->epochs)
        if (std::isfinite(em.*(col.field))) {
          any = true;
          break;
        }
    if (!any) {
      emission.notices.push_back(dataset + ": no " + col.suffix +
                                 " series (validation set absent); file omitted");
      continue;
    }

    const std::filesystem::path path = out_dir / (dataset + "_" + std::string(col.suffix) + ".dat");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# epoch";
    for (const auto& [label, trace] : series) out << ' ' << label;
    out << '\n';
    char buf[40];
    for (std::size_t e = 0; e < epochs; ++e) {
      out << (e + 1);
      for (const auto& [label, trace] : series) {
        const double v = e < trace->epochs.size()
                             ? trace->epochs[e].*(col.field)
                             : std::numeric_limits<double>::quiet_NaN();
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        out << ' ' << buf;
      }
      out << '\n';
    }
    emission.files.push_back(path);
  }
  return emission;
}

}  // namespace eegml0::bench
