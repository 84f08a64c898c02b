#include "eegml0/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace eegml0 {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_trace(const std::filesystem::path& path, const TrainTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace " + path.string());

  out << "# eegml0 trace\n";
  out << "# steps=" << trace.records.size() << "\n";
  out << "# epochs=" << trace.epochs.size() << "\n";
  if (std::isfinite(trace.eta)) out << "# eta=" << fmt(trace.eta) << "\n";
  if (std::isfinite(trace.eta_min)) out << "# eta_min=" << fmt(trace.eta_min) << "\n";
  if (std::isfinite(trace.eta_max)) out << "# eta_max=" << fmt(trace.eta_max) << "\n";
  if (std::isfinite(trace.beta)) out << "# beta=" << fmt(trace.beta) << "\n";
  if (std::isfinite(trace.lipschitz)) out << "# lipschitz=" << fmt(trace.lipschitz) << "\n";
  if (!trace.epochs.empty())
    out << "# final_loss=" << fmt(trace.epochs.back().train_loss) << "\n";
  out << "# columns: iteration loss grad_norm step_norm accuracy\n";

  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const IterationRecord& r = trace.records[i];
    double acc = std::numeric_limits<double>::quiet_NaN();
    if (r.epoch >= 0 && static_cast<std::size_t>(r.epoch) < trace.epochs.size()) {
      const EpochMetrics& em = trace.epochs[static_cast<std::size_t>(r.epoch)];
      acc = std::isfinite(em.val_accuracy) ? em.val_accuracy : em.train_accuracy;
    }
    out << i << ' ' << fmt(r.loss) << ' ' << fmt(r.grad_norm) << ' ' << fmt(r.step_norm)
        << ' ' << fmt(acc) << '\n';
  }
}

ParsedTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace " + path.string());

  ParsedTrace t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        key.erase(key.find_last_not_of(' ') + 1);
        try {
          t.metadata[key] = std::stod(line.substr(eq + 1));
        } catch (const std::exception&) {
          // non-numeric metadata is ignored
        }
      }
      continue;
    }
    std::istringstream row(line);
    long iter;
    double loss, gnorm, snorm, acc;
    if (!(row >> iter >> loss >> gnorm >> snorm >> acc))
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": malformed trace row");
    t.loss.push_back(loss);
    t.grad_norm.push_back(gnorm);
    t.step_norm.push_back(snorm);
    t.accuracy.push_back(acc);
    t.epoch_of.push_back(iter);
  }
  if (t.loss.empty()) throw std::runtime_error(path.string() + ": empty trace");
  return t;
}

}  // namespace eegml0
