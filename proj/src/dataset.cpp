#include "eegml0/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>

#include "eegml0/rng.hpp"

namespace eegml0 {

void Dataset::reserve(std::size_t rows) {
  x_.reserve(rows * dim_);
  y_.reserve(rows);
}

void Dataset::add(std::span<const double> features, double label) {
  if (dim_ == 0 && y_.empty()) dim_ = features.size();
  if (features.size() != dim_)
    throw std::invalid_argument("Dataset::add: expected " + std::to_string(dim_) +
                                " features, got " + std::to_string(features.size()));
  for (double v : features)
    if (!std::isfinite(v)) throw std::invalid_argument("Dataset::add: non-finite feature");
  if (!(label >= 0.0 && label <= 1.0))
    throw std::invalid_argument("Dataset::add: label outside [0, 1]");
  x_.insert(x_.end(), features.begin(), features.end());
  y_.push_back(label);
}

bool Dataset::labels_binary() const {
  for (double v : y_)
    if (v != 0.0 && v != 1.0) return false;
  return true;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* begin = t.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + t.size() && std::isfinite(out);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open " + path.string(), 0, 0);

  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_line(line, options.delimiter));
  }
  if (rows.empty()) throw CsvError(path.string() + ": empty file", 0, 0);

  const std::size_t arity = rows[0].size();
  if (arity < 2) throw CsvError(path.string() + ": need at least two columns", 1, 0);
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r].size() != arity)
      throw CsvError(path.string() + ": ragged row (expected " + std::to_string(arity) +
                         " cells, got " + std::to_string(rows[r].size()) + ")",
                     r + 1, 0);

  bool has_header;
  if (options.has_header.has_value()) {
    has_header = *options.has_header;
  } else {
    double tmp;
    has_header = false;
    for (const std::string& cell : rows[0])
      if (!parse_double(cell, tmp)) { has_header = true; break; }
  }

  std::vector<std::string> header;
  if (has_header) {
    for (const std::string& cell : rows[0]) header.push_back(trim(cell));
    rows.erase(rows.begin());
    if (rows.empty()) throw CsvError(path.string() + ": no data rows", 0, 0);
  }

  std::size_t label_col = arity - 1;
  if (options.label_column.has_value()) {
    const std::string& want = *options.label_column;
    double idx;
    if (parse_double(want, idx) && idx >= 0 && idx == std::floor(idx) &&
        static_cast<std::size_t>(idx) < arity) {
      label_col = static_cast<std::size_t>(idx);
    } else if (want == "last") {
      label_col = arity - 1;
    } else {
      auto it = std::find(header.begin(), header.end(), want);
      if (it == header.end())
        throw CsvError(path.string() + ": label column '" + want + "' not found", 0, 0);
      label_col = static_cast<std::size_t>(it - header.begin());
    }
  }

  // Two distinct raw label values; lexicographically smaller maps to 0.
  std::map<std::string, double> label_map;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    label_map.emplace(trim(rows[r][label_col]), 0.0);
    if (label_map.size() > 2)
      throw CsvError(path.string() + ": more than two distinct label values", r + 1,
                     label_col + 1);
  }
  {
    double code = 0.0;
    for (auto& [raw, enc] : label_map) enc = code++;  // std::map iterates in key order
  }

  Dataset data(path.stem().string(), arity - 1);
  data.reserve(rows.size());
  std::vector<double> features(arity - 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::size_t f = 0;
    for (std::size_t c = 0; c < arity; ++c) {
      if (c == label_col) continue;
      if (!parse_double(rows[r][c], features[f]))
        throw CsvError(path.string() + ": unparseable cell '" + trim(rows[r][c]) + "'",
                       r + 1, c + 1);
      ++f;
    }
    data.add(features, label_map.at(trim(rows[r][label_col])));
  }
  if (has_header) {
    for (std::size_t c = 0; c < arity; ++c)
      if (c != label_col) data.feature_names().push_back(header[c]);
  }
  return data;
}

std::optional<NormalizeMode> parse_normalize_mode(const std::string& s) {
  if (s == "none") return NormalizeMode::none;
  if (s == "minmax") return NormalizeMode::min_max;
  if (s == "zscore") return NormalizeMode::z_score;
  return std::nullopt;
}

const char* to_string(NormalizeMode m) {
  switch (m) {
    case NormalizeMode::none: return "none";
    case NormalizeMode::min_max: return "minmax";
    case NormalizeMode::z_score: return "zscore";
  }
  return "?";
}

std::pair<Dataset, NormalizationParams> normalize(const Dataset& data, NormalizeMode mode) {
  if (data.empty()) throw std::invalid_argument("normalize: empty dataset");
  const std::size_t p = data.dim();
  NormalizationParams params;
  params.mode = mode;
  params.offset.assign(p, 0.0);
  params.scale.assign(p, 1.0);

  if (mode == NormalizeMode::min_max) {
    std::vector<double> lo(p, std::numeric_limits<double>::infinity());
    std::vector<double> hi(p, -std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < data.size(); ++j) {
      auto r = data.row(j);
      for (std::size_t i = 0; i < p; ++i) {
        lo[i] = std::min(lo[i], r[i]);
        hi[i] = std::max(hi[i], r[i]);
      }
    }
    for (std::size_t i = 0; i < p; ++i) {
      params.offset[i] = lo[i];
      params.scale[i] = hi[i] > lo[i] ? 1.0 / (hi[i] - lo[i]) : 0.0;  // constant column -> 0
    }
  } else if (mode == NormalizeMode::z_score) {
    std::vector<double> mean(p, 0.0), m2(p, 0.0);
    for (std::size_t j = 0; j < data.size(); ++j) {
      auto r = data.row(j);
      for (std::size_t i = 0; i < p; ++i) mean[i] += r[i];
    }
    for (std::size_t i = 0; i < p; ++i) mean[i] /= static_cast<double>(data.size());
    for (std::size_t j = 0; j < data.size(); ++j) {
      auto r = data.row(j);
      for (std::size_t i = 0; i < p; ++i) {
        const double d = r[i] - mean[i];
        m2[i] += d * d;
      }
    }
    for (std::size_t i = 0; i < p; ++i) {
      const double sd = std::sqrt(m2[i] / static_cast<double>(data.size()));
      params.offset[i] = mean[i];
      params.scale[i] = sd > 0.0 ? 1.0 / sd : 0.0;
    }
  }
  return {apply_normalization(data, params), params};
}

Dataset apply_normalization(const Dataset& data, const NormalizationParams& params) {
  if (params.mode == NormalizeMode::none) return data;
  if (params.offset.size() != data.dim())
    throw std::invalid_argument("apply_normalization: dimension mismatch");
  Dataset out(data.name(), data.dim());
  out.feature_names() = data.feature_names();
  out.reserve(data.size());
  std::vector<double> row(data.dim());
  for (std::size_t j = 0; j < data.size(); ++j) {
    auto r = data.row(j);
    for (std::size_t i = 0; i < data.dim(); ++i)
      row[i] = (r[i] - params.offset[i]) * params.scale[i];
    out.add(row, data.label(j));
  }
  return out;
}

namespace {

Dataset take_rows(const Dataset& data, const std::vector<std::size_t>& idx,
                  const std::string& suffix) {
  Dataset out(data.name() + suffix, data.dim());
  out.feature_names() = data.feature_names();
  out.reserve(idx.size());
  for (std::size_t j : idx) out.add(data.row(j), data.label(j));
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw std::invalid_argument("split: train_fraction must be in (0, 1)");
  if (data.size() < 2) throw std::invalid_argument("split: need at least two samples");

  const std::size_t total =
      static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(data.size())));

  std::vector<std::size_t> train_idx, val_idx;
  Rng rng(spec.seed);

  if (spec.stratified) {
    std::vector<double> classes;
    for (std::size_t j = 0; j < data.size(); ++j) {
      const double y = data.label(j);
      if (std::find(classes.begin(), classes.end(), y) == classes.end()) classes.push_back(y);
    }
    if (classes.size() != 2)
      throw std::invalid_argument("split: stratified split needs exactly two classes");
    std::sort(classes.begin(), classes.end());

    std::vector<std::size_t> by_class[2];
    for (std::size_t j = 0; j < data.size(); ++j)
      by_class[data.label(j) == classes[1] ? 1 : 0].push_back(j);
    if (by_class[0].size() < 2 || by_class[1].size() < 2)
      throw std::invalid_argument("split: need at least two samples per class to stratify");

    const std::size_t n0 = by_class[0].size();
    const std::size_t n1 = by_class[1].size();
    // Per-class counts: round within class 0, then force the overall size
    // contract; the class ratio stays within one sample of proportional.
    std::size_t k0 = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(n0)));
    k0 = std::min({k0, n0, total});
    std::size_t k1 = total - k0;
    if (k1 > n1) {
      k0 = total - n1;
      k1 = n1;
    }

    rng.shuffle(by_class[0]);
    rng.shuffle(by_class[1]);
    for (std::size_t i = 0; i < by_class[0].size(); ++i)
      (i < k0 ? train_idx : val_idx).push_back(by_class[0][i]);
    for (std::size_t i = 0; i < by_class[1].size(); ++i)
      (i < k1 ? train_idx : val_idx).push_back(by_class[1][i]);
  } else {
    std::vector<std::size_t> idx(data.size());
    for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i)
      (i < total ? train_idx : val_idx).push_back(idx[i]);
  }

  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  return {take_rows(data, train_idx, ""), take_rows(data, val_idx, "")};
}

Dataset augment_bias(const Dataset& data) {
  Dataset out(data.name(), data.dim() + 1);
  if (!data.feature_names().empty()) {
    out.feature_names() = data.feature_names();
    out.feature_names().push_back("bias");
  }
  out.reserve(data.size());
  std::vector<double> row(data.dim() + 1);
  for (std::size_t j = 0; j < data.size(); ++j) {
    auto r = data.row(j);
    std::copy(r.begin(), r.end(), row.begin());
    row.back() = 1.0;
    out.add(row, data.label(j));
  }
  return out;
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  const std::filesystem::path base = path.parent_path();
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto cells = split_line(t, ',');
    if (cells.size() < 2)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected name,path[,label_column[,epochs]]");
    ManifestEntry e;
    e.name = trim(cells[0]);
    std::filesystem::path p = trim(cells[1]);
    e.path = p.is_absolute() ? p : base / p;
    if (cells.size() > 2 && !trim(cells[2]).empty() && trim(cells[2]) != "-")
      e.label_column = trim(cells[2]);
    if (cells.size() > 3 && !trim(cells[3]).empty() && trim(cells[3]) != "-") {
      double v;
      if (!parse_double(cells[3], v) || v < 1 || v != std::floor(v))
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                 ": bad epochs override '" + trim(cells[3]) + "'");
      e.epochs_override = static_cast<long>(v);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace eegml0
