#pragma once

#include <string>

#include "simstack/diffraction.hpp"

namespace simstack {

// Flat text format: first line "L N", then L*N lines "amplitude,phase"
// in layer-major order. Round-trips doubles exactly (hex-free, max_digits10).
void save_stack(const StackState& stack, const std::string& path);
StackState load_stack(const std::string& path);

}  // namespace simstack
