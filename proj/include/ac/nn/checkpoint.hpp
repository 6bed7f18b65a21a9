#pragma once

#include <string>

#include "ac/nn/params.hpp"

namespace ac::nn {

// Checkpoint container: u64 little-endian header length, a JSON header
// listing {name, shape, offset} per array in order, then the raw f64 payload.

void save_checkpoint(const std::string& path, const ParamSet& params);

/// Loads into an existing set; names and shapes must match the layout.
void load_checkpoint(const std::string& path, ParamSet& params);

}  // namespace ac::nn
