#pragma once

#include <string>

#include "semlens/model.hpp"

namespace semlens {

// Checkpoint layout: a short text header (architecture, shapes,
// standardization stats, seed) followed by the weights of every
// parameterized layer, in declaration order, as little-endian 32-bit floats
// (w then b per layer). save(load(f)) reproduces f byte for byte.
void save_checkpoint(const std::string& path, const CnnModel& model);
CnnModel load_checkpoint(const std::string& path);

}  // namespace semlens
