#pragma once

#include "mstep/nn/mlp.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace mstep::nn {

// Binary checkpoint layout, little-endian:
//   "MSNN" | u32 version (1) | u32 size count L | i32 sizes[L]
//   | u8 hidden activation | u8 output activation
//   | for each layer: f64 weights (out x in, row-major), f64 bias[out]
void save_mlp(const Mlp& net, std::ostream& out);
Mlp load_mlp(std::istream& in);

/// Several networks in one file: u32 count followed by that many records.
void save_mlps(const std::vector<const Mlp*>& nets, const std::filesystem::path& path);
std::vector<Mlp> load_mlps(const std::filesystem::path& path);

}  // namespace mstep::nn
