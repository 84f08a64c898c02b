#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eegml0 {

struct Sample {
  std::vector<double> features;
  double label = 0.0;  // in [0, 1]
};

// Immutable-after-construction training set. Rows are stored contiguously so
// the kernels can stream them.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string name, std::size_t dim) : name_(std::move(name)), dim_(dim) {}

  void reserve(std::size_t rows);
  void add(std::span<const double> features, double label);
  void add(const Sample& s) { add(s.features, s.label); }

  std::size_t size() const { return y_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return y_.empty(); }

  std::span<const double> row(std::size_t j) const {
    return {x_.data() + j * dim_, dim_};
  }
  double label(std::size_t j) const { return y_[j]; }
  std::span<const double> labels() const { return y_; }
  const double* feature_data() const { return x_.data(); }

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }
  std::vector<std::string>& feature_names() { return feature_names_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  // True when every label is exactly 0 or 1 (confusion counting needs this).
  bool labels_binary() const;

 private:
  std::string name_;
  std::size_t dim_ = 0;
  std::vector<double> x_;  // row-major, size() * dim()
  std::vector<double> y_;
  std::vector<std::string> feature_names_;
};

struct CsvError : std::runtime_error {
  CsvError(const std::string& msg, std::size_t row, std::size_t col)
      : std::runtime_error(msg), row(row), col(col) {}
  std::size_t row;  // 1-based data row (0 = file-level problem)
  std::size_t col;  // 1-based column (0 = row-level problem)
};

struct CsvOptions {
  std::optional<bool> has_header;       // unset: detect (header iff row 0 has a non-numeric cell)
  std::optional<std::string> label_column;  // column name or 0-based index; default last
  char delimiter = ',';
};

// Parses a two-class CSV. The two distinct raw label values map to {0, 1},
// lexicographically smaller value first. Missing cells, ragged rows, more
// than two label values and unparseable numbers are CsvErrors carrying the
// row/column location.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

enum class NormalizeMode { none, min_max, z_score };

std::optional<NormalizeMode> parse_normalize_mode(const std::string& s);
const char* to_string(NormalizeMode m);

// Per-feature affine transform x' = (x - offset) * scale, fitted on one set
// and replayable on another (validation data must use training statistics).
struct NormalizationParams {
  NormalizeMode mode = NormalizeMode::none;
  std::vector<double> offset;
  std::vector<double> scale;
};

std::pair<Dataset, NormalizationParams> normalize(const Dataset& data, NormalizeMode mode);
Dataset apply_normalization(const Dataset& data, const NormalizationParams& params);

struct SplitSpec {
  double train_fraction = 0.7;  // in (0, 1)
  std::uint64_t seed = 0;
  bool stratified = true;
};

// Disjoint, exhaustive partition with |train| = round(train_fraction * J).
// Stratified mode keeps the class ratio within one sample and requires at
// least two samples per class.
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitSpec& spec);

// Appends a constant-1 feature (intercept). Applied after normalization.
Dataset augment_bias(const Dataset& data);

struct ManifestEntry {
  std::string name;
  std::filesystem::path path;
  std::optional<std::string> label_column;
  std::optional<long> epochs_override;
};

// One dataset per line: name,path[,label_column[,epochs_override]].
// '#' starts a comment; blank lines are skipped. Relative paths resolve
// against the manifest's directory.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

}  // namespace eegml0
