#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "eegml0/optimizer.hpp"

namespace eegml0 {

// Columnar trace file: '#'-prefixed key=value metadata, then one row per
// update step with columns
//   iteration loss grad_norm step_norm accuracy
// where accuracy is the epoch's validation accuracy when available, else the
// epoch's training accuracy, else nan. Values print with %.17g and so
// round-trip bit-exactly.
void write_trace(const std::filesystem::path& path, const TrainTrace& trace);

struct ParsedTrace {
  std::vector<double> loss;
  std::vector<double> grad_norm;
  std::vector<double> step_norm;
  std::vector<double> accuracy;
  std::vector<long> epoch_of;  // epoch index per row (from metadata cadence when present)
  std::map<std::string, double> metadata;

  bool has(const std::string& key) const { return metadata.count(key) != 0; }
  double get(const std::string& key, double fallback) const {
    auto it = metadata.find(key);
    return it == metadata.end() ? fallback : it->second;
  }
};

ParsedTrace read_trace(const std::filesystem::path& path);

}  // namespace eegml0
