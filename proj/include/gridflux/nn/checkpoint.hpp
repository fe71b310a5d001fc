#pragma once

// Plain-text parameter checkpoints:
//
//   gridflux-checkpoint 1
//   net <name> <n_layers+1 widths...> <linear|tanh>
//   <param_count values, one per line, row-major W then b per layer>
//   vec <name> <n>
//   <n values>
//   end
//
// Values are printed with 17 significant digits so a save/load round trip is
// exact. Files are written to "<path>.tmp" and renamed into place.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gridflux/nn/mlp.hpp"

namespace gridflux::nn {

struct Checkpoint {
  std::map<std::string, MlpNet> nets;
  std::map<std::string, std::vector<double>> vectors;

  void save(const std::filesystem::path& path) const;
  // Throws SchemaError on malformed content.
  static Checkpoint load(const std::filesystem::path& path);
};

}  // namespace gridflux::nn
