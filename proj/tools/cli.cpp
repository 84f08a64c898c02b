// Command-line harness: single runs, the full benchmark suite, trace
// diagnostics, and the sigma sweep.
//
// Exit codes: 0 success, 2 bad configuration/usage, 3 data problem,
// 4 training divergence, 5 descent check reported violations, 1 other.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eegml0/bench.hpp"
#include "eegml0/dataset.hpp"
#include "eegml0/diagnostics.hpp"
#include "eegml0/optimizer.hpp"
#include "eegml0/synth.hpp"
#include "eegml0/trace_io.hpp"

namespace {

using namespace eegml0;

struct CsvFlags {
  std::string label_col;
  std::string delimiter = ",";
  bool force_header = false;
  bool force_no_header = false;

  CsvOptions to_options() const {
    CsvOptions o;
    if (!label_col.empty()) o.label_column = label_col;
    if (!delimiter.empty()) o.delimiter = delimiter[0];
    if (force_header) o.has_header = true;
    if (force_no_header) o.has_header = false;
    return o;
  }
};

void add_csv_flags(CLI::App* cmd, CsvFlags& flags) {
  cmd->add_option("--label-col", flags.label_col,
                  "label column: name, 0-based index, or 'last' (default last)");
  cmd->add_option("--delimiter", flags.delimiter, "CSV delimiter (default ',')");
  auto* h = cmd->add_flag("--header", flags.force_header, "first row is a header");
  cmd->add_flag("--no-header", flags.force_no_header, "first row is data")->excludes(h);
}

RegVariant parse_reg(const std::string& s) {
  if (s == "reg1") return RegVariant::reg1;
  if (s == "reg2") return RegVariant::reg2;
  if (s == "reg3") return RegVariant::reg3;
  if (s == "reg4") return RegVariant::reg4;
  throw CLI::ValidationError("--reg", "expected reg1..reg4, got '" + s + "'");
}

NormalizeMode parse_norm(const std::string& s) {
  auto m = parse_normalize_mode(s);
  if (!m) throw CLI::ValidationError("--normalize", "expected none|minmax|zscore");
  return *m;
}

int cmd_train(const std::string& dataset_path, const CsvFlags& csv, std::string method_token,
              const std::string& reg, bool reg_given, double sigma, double lambda, double lr,
              long epochs, long batch_size, std::uint64_t seed, const std::string& norm_mode,
              bool no_bias, bool certified, double safe_fraction, double split_fraction,
              bool no_split, const std::string& trace_out) {
  auto method = bench::MethodConfig::parse(method_token);
  if (!method) {
    std::cerr << "unknown method '" << method_token << "'\n";
    return 2;
  }
  // an explicit --reg wins over a variant suffix in --method
  if (method->family == bench::MethodConfig::Family::eegml0 && reg_given)
    method->variant = parse_reg(reg);
  method->sigma = sigma;
  method->lambda = lambda;
  method->learning_rate = lr;
  method->epochs = epochs;

  Dataset raw = load_csv(dataset_path, csv.to_options());
  std::optional<Dataset> val;
  Dataset train_part = raw;
  if (!no_split) {
    SplitSpec spec;
    spec.train_fraction = split_fraction;
    spec.seed = seed;
    spec.stratified = raw.labels_binary();
    auto [tr, va] = split(raw, spec);
    train_part = std::move(tr);
    val = std::move(va);
  }

  auto [train_set, params] = normalize(train_part, parse_norm(norm_mode));
  if (val) val = apply_normalization(*val, params);
  if (!no_bias) {
    train_set = augment_bias(train_set);
    if (val) val = augment_bias(*val);
  }

  TrainConfig config;
  config.epochs = epochs;
  config.seed = seed;
  config.loss = method->to_loss_kind();
  config.certified = certified;
  if (batch_size > 0)
    config.batch = BatchPolicy::mini(static_cast<std::size_t>(batch_size));
  if (certified) {
    const double L = lipschitz_bound(config.loss, train_set);
    const SafeStep s = safe_step(L, safe_fraction);
    config.policy = StepPolicy::fixed(s.eta);
    std::printf("lipschitz_bound L = %.6g, eta = %.6g (fraction %.3g of 2/L), beta = %.6g\n",
                L, s.eta, safe_fraction, s.beta);
  } else {
    config.policy = StepPolicy::manual(lr);
  }

  const TrainTrace trace = train(config, train_set, val ? &*val : nullptr);
  const EpochMetrics& fin = trace.epochs.back();
  std::printf("dataset %s: J=%zu p=%zu  method=%s epochs=%ld\n", raw.name().c_str(), raw.size(),
              raw.dim(), method->label().c_str(), epochs);
  std::printf("final train loss     %.10g\n", fin.train_loss);
  std::printf("final grad norm      %.10g\n", trace.records.back().grad_norm);
  if (std::isfinite(fin.train_accuracy))
    std::printf("train accuracy       %.4f\n", fin.train_accuracy);
  if (std::isfinite(fin.val_accuracy))
    std::printf("validation accuracy  %.4f\n", fin.val_accuracy);

  if (certified) {
    const DescentReport report = check_descent(trace, trace.beta);
    std::printf("descent check        %s (%zu violations over %ld steps)\n",
                report.ok() ? "ok" : "VIOLATED", report.violating_steps.size(),
                report.total_steps);
    if (!report.ok()) return 5;
  }
  if (!trace_out.empty()) {
    write_trace(trace_out, trace);
    std::printf("trace written to %s\n", trace_out.c_str());
  }
  return 0;
}

int cmd_suite(const std::string& manifest_path, const std::string& methods_arg, long trials,
              const std::string& out_dir, std::uint64_t seed_base, bool fixed_split,
              const std::string& norm_mode, bool no_bias, bool emit_plots, long eval_every) {
  bench::SuiteOptions options;
  options.experiment.trials = trials;
  options.experiment.seed_base = seed_base;
  options.experiment.fixed_split = fixed_split;
  options.experiment.normalize = parse_norm(norm_mode);
  options.experiment.add_bias = !no_bias;
  options.experiment.eval_every = eval_every;
  options.emit_plots = emit_plots;

  if (!methods_arg.empty() && methods_arg != "all") {
    std::string token;
    std::istringstream in(methods_arg);
    while (std::getline(in, token, ',')) {
      auto m = bench::MethodConfig::parse(token);
      if (!m) {
        std::cerr << "unknown method '" << token << "'\n";
        return 2;
      }
      options.methods.push_back(*m);
    }
  }

  const auto manifest = load_manifest(manifest_path);
  const bench::SuiteResult suite = bench::run_suite(manifest, options, out_dir);
  std::cout << bench::render_table(suite.cells);
  std::printf("\n%zu cells in %.1f s (slowest cell %.1f s)\n", suite.cells.size(),
              suite.total_seconds, suite.max_cell_seconds);
  std::printf("results: %s\n", suite.results_file.c_str());

  for (const bench::ExperimentResult& c : suite.cells)
    if (c.trials_failed == c.trials_requested) {
      std::cerr << "cell " << c.dataset << "/" << c.method << " failed entirely\n";
      return 4;
    }
  return 0;
}

int cmd_check(const std::string& trace_path, double beta_arg, double tolerance,
              const std::string& report_out) {
  const ParsedTrace t = read_trace(trace_path);
  double beta = beta_arg;
  if (!(beta > 0.0)) beta = t.get("beta", std::numeric_limits<double>::quiet_NaN());
  if (!std::isfinite(beta)) {
    std::cerr << "no --beta given and the trace carries none\n";
    return 2;
  }

  std::vector<double> losses = t.loss;
  if (t.has("final_loss")) losses.push_back(t.get("final_loss", 0.0));
  const DescentReport report = check_descent(losses, t.grad_norm, beta, tolerance);
  const long bad_m = check_summability(losses, t.grad_norm, beta, tolerance);

  std::printf("steps checked            %ld\n", report.total_steps);
  std::printf("beta used                %.10g\n", beta);
  std::printf("violations               %zu\n", report.violating_steps.size());
  std::printf("max scaled violation     %.3e\n", report.max_violation_magnitude);
  std::printf("summability              %s\n",
              bad_m < 0 ? "ok" : ("violated at m = " + std::to_string(bad_m)).c_str());
  for (std::size_t i = 0; i < std::min<std::size_t>(report.violating_steps.size(), 10); ++i) {
    const DescentViolation& v = report.violating_steps[i];
    std::printf("  step %ld: L(next) = %.10g > %.10g\n", v.iteration, v.lhs, v.rhs);
  }

  if (!report_out.empty()) {
    std::vector<std::pair<std::string, std::string>> fields;
    fields.emplace_back("trace", trace_path);
    fields.emplace_back("steps", std::to_string(report.total_steps));
    fields.emplace_back("beta", std::to_string(beta));
    fields.emplace_back("violations", std::to_string(report.violating_steps.size()));
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", report.max_violation_magnitude);
    fields.emplace_back("max_scaled_violation", buf);
    fields.emplace_back("summability_ok", bad_m < 0 ? "true" : "false");
    write_report(report_out, fields);
  }
  return report.ok() && bad_m < 0 ? 0 : 5;
}

int cmd_sweep(const std::string& dataset_path, const CsvFlags& csv, const std::string& reg,
              std::vector<double> values, double lambda, double lr, long epochs, long trials,
              std::uint64_t seed_base, const std::string& norm_mode) {
  if (values.empty()) values = {0.01, 0.1, 0.5, 1.0};
  Dataset data = load_csv(dataset_path, csv.to_options());

  bench::ExperimentOptions options;
  options.trials = trials;
  options.seed_base = seed_base;
  options.normalize = parse_norm(norm_mode);

  std::printf("%10s  %10s  %10s\n", "sigma", "mean acc", "std");
  for (double sigma : values) {
    bench::MethodConfig method;
    method.family = bench::MethodConfig::Family::eegml0;
    method.variant = parse_reg(reg);
    method.sigma = sigma;
    method.lambda = lambda;
    method.learning_rate = lr;
    method.epochs = epochs;
    const bench::ExperimentResult r = bench::run_experiment(method, data, options);
    std::printf("%10.4g  %10.4f  %10.4f\n", sigma, r.mean, r.stddev);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entropy-error gradient training with smoothing l0 regularization"};
  app.require_subcommand(1);

  // train
  std::string dataset_path, method_token = "eegml0", reg = "reg1";
  double sigma = 1.0, lambda = 1e-4, lr = 1e-3, safe_fraction = 0.9, split_fraction = 0.7;
  long epochs = 15000, batch_size = 0, eval_every = 1;
  std::uint64_t seed = 1;
  std::string norm_mode = "minmax", trace_out;
  bool no_bias = false, certified = false, no_split = false;
  CsvFlags train_csv;

  auto* train_cmd = app.add_subcommand("train", "train one configuration on one dataset");
  train_cmd->add_option("--dataset", dataset_path, "CSV file")->required();
  add_csv_flags(train_cmd, train_csv);
  train_cmd->add_option("--method", method_token, "eegml0|eegm|sgm-l2|sgm (default eegml0)");
  train_cmd->add_option("--reg", reg, "regularizer variant for eegml0 (reg1..reg4)");
  train_cmd->add_option("--sigma", sigma, "smoothing scale (default 1.0)");
  train_cmd->add_option("--lambda", lambda, "penalty weight (default 1e-4)");
  train_cmd->add_option("--lr", lr, "learning rate (default 1e-3)");
  train_cmd->add_option("--epochs", epochs, "epochs (default 15000)");
  train_cmd->add_option("--batch-size", batch_size, "mini-batch size; 0 = full batch");
  train_cmd->add_option("--seed", seed, "seed for split and init");
  train_cmd->add_option("--normalize", norm_mode, "none|minmax|zscore (default minmax)");
  train_cmd->add_flag("--no-bias", no_bias, "skip the constant-1 intercept feature");
  train_cmd->add_flag("--certified", certified,
                      "derive eta from the Lipschitz bound and verify descent");
  train_cmd->add_option("--safe-fraction", safe_fraction, "eta as a fraction of 2/L");
  train_cmd->add_option("--split", split_fraction, "train fraction (default 0.7)");
  train_cmd->add_flag("--no-split", no_split, "train on the whole file");
  train_cmd->add_option("--trace-out", trace_out, "write the iteration trace here");

  // suite
  std::string manifest_path, methods_arg = "all", out_dir = "suite-out";
  long trials = 20;
  std::uint64_t seed_base = 1;
  bool fixed_split = false, emit_plots = false;

  auto* suite_cmd = app.add_subcommand("suite", "run the dataset x method benchmark grid");
  suite_cmd->add_option("--manifest", manifest_path, "manifest file")->required();
  suite_cmd->add_option("--methods", methods_arg, "comma list or 'all'");
  suite_cmd->add_option("--trials", trials, "trials per cell (default 20)");
  suite_cmd->add_option("--out-dir", out_dir, "output directory")->required();
  suite_cmd->add_option("--seed-base", seed_base, "trial k uses seed-base + k");
  suite_cmd->add_flag("--fixed-split", fixed_split, "one split for all trials");
  suite_cmd->add_option("--normalize", norm_mode, "none|minmax|zscore (default minmax)");
  suite_cmd->add_flag("--no-bias", no_bias, "skip the intercept feature");
  suite_cmd->add_flag("--emit-plots", emit_plots, "write per-epoch curves for trial 0");
  suite_cmd->add_option("--eval-every", eval_every, "validation metric cadence");

  // check
  std::string trace_path, report_out;
  double beta_arg = 0.0, tolerance = 1e-10;

  auto* check_cmd = app.add_subcommand("check", "descent diagnostics over a trace file");
  check_cmd->add_option("--trace", trace_path, "trace file")->required();
  check_cmd->add_option("--beta", beta_arg, "descent margin (default: from trace)");
  check_cmd->add_option("--tolerance", tolerance, "relative slack (default 1e-10)");
  check_cmd->add_option("--report-out", report_out, "write the key-value report here");

  // sweep-sigma
  std::vector<double> sweep_values;
  auto* sweep_cmd = app.add_subcommand("sweep-sigma", "rerun one eegml0 variant across sigmas");
  sweep_cmd->add_option("--dataset", dataset_path, "CSV file")->required();
  CsvFlags sweep_csv;
  add_csv_flags(sweep_cmd, sweep_csv);
  sweep_cmd->add_option("--reg", reg, "regularizer variant (default reg1)");
  sweep_cmd->add_option("--values", sweep_values, "sigma values (default 0.01 0.1 0.5 1.0)");
  sweep_cmd->add_option("--lambda", lambda, "penalty weight");
  sweep_cmd->add_option("--lr", lr, "learning rate");
  sweep_cmd->add_option("--epochs", epochs, "epochs");
  sweep_cmd->add_option("--trials", trials, "trials per sigma (default 20)");
  sweep_cmd->add_option("--seed-base", seed_base, "base seed");
  sweep_cmd->add_option("--normalize", norm_mode, "none|minmax|zscore");

  // datagen (convenience mirror of the standalone tool)
  std::string gen_dir = "data";
  auto* gen_cmd = app.add_subcommand("datagen", "write the synthetic benchmark corpus");
  gen_cmd->add_option("--out-dir", gen_dir, "target directory (default data)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train_cmd)
      return cmd_train(dataset_path, train_csv, method_token, reg,
                       train_cmd->count("--reg") > 0, sigma, lambda, lr, epochs, batch_size,
                       seed, norm_mode, no_bias, certified, safe_fraction, split_fraction,
                       no_split, trace_out);
    if (*suite_cmd)
      return cmd_suite(manifest_path, methods_arg, trials, out_dir, seed_base, fixed_split,
                       norm_mode, no_bias, emit_plots, eval_every);
    if (*check_cmd) return cmd_check(trace_path, beta_arg, tolerance, report_out);
    if (*sweep_cmd)
      return cmd_sweep(dataset_path, sweep_csv, reg, sweep_values, lambda, lr, epochs, trials,
                       seed_base, norm_mode);
    if (*gen_cmd) {
      const auto manifest = synth::write_corpus(gen_dir);
      std::printf("corpus written, manifest: %s\n", manifest.c_str());
      return 0;
    }
  } catch (const eegml0::DivergenceError& e) {
    std::cerr << "training diverged: " << e.what() << "\n";
    return 4;
  } catch (const eegml0::CsvError& e) {
    std::cerr << "data error (row " << e.row << ", col " << e.col << "): " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bad configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "bad input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
