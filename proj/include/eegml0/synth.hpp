#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "eegml0/dataset.hpp"

namespace eegml0::synth {

// Deterministic two-class generator. Class-conditional Gaussian signal on the
// first `informative` features (total mean separation `separation` in noise
// units), pure noise elsewhere, optionally quantized to integer-looking
// values. Same spec, same bytes.
struct ClassificationSpec {
  std::string name;
  std::size_t rows = 100;
  std::size_t features = 10;
  std::size_t informative = 4;
  double separation = 1.5;     // ||mu_1 - mu_0|| across informative features
  double class1_fraction = 0.5;
  bool binary_features = false;  // Bernoulli features instead of Gaussian
  std::uint64_t seed = 1;
};

Dataset make_classification(const ClassificationSpec& spec);

// Linearly separable set with a guaranteed margin: labels follow a fixed
// hyperplane and points inside the margin band are resampled.
Dataset make_separable(std::size_t rows, std::size_t dim, double margin, std::uint64_t seed);

// The nine-dataset benchmark corpus, with separability tuned per dataset so
// trained accuracy lands in its target band. Stand-ins for local runs; any
// real CSV can be swapped in through the manifest.
std::vector<ClassificationSpec> standard_corpus();

// CSV with a header row (f1..fp, class); integer-formatted cells where the
// values are whole numbers.
void write_csv(const Dataset& data, const std::filesystem::path& path);

// Writes the nine CSVs plus manifest.txt (the spect_heart row carries its
// 5000-epoch override). Returns the manifest path.
std::filesystem::path write_corpus(const std::filesystem::path& dir);

}  // namespace eegml0::synth
