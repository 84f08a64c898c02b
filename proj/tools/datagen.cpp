// Writes the synthetic nine-dataset benchmark corpus and its manifest.

#include <cstdio>
#include <string>

#include "eegml0/synth.hpp"

int main(int argc, char** argv) {
  std::string out_dir = "data";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if ((arg == "--out-dir" || arg == "-o") && i + 1 < argc) {
      out_dir = argv[++i];
    } else if (arg == "--help" || arg == "-h") {
      std::printf("usage: datagen [--out-dir DIR]\n");
      return 0;
    } else {
      std::fprintf(stderr, "unknown argument '%s'\n", arg.c_str());
      return 2;
    }
  }
  try {
    const auto manifest = eegml0::synth::write_corpus(out_dir);
    std::printf("corpus written, manifest: %s\n", manifest.c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
