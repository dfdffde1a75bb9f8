#pragma once

#include <string>
#include <vector>

#include "csifoc/sim.hpp"

namespace csifoc {

/// Write the five standard SVG figures for a trace into out_dir:
/// speed, estimated-vs-virtual position, real-vs-estimated position,
/// phase + rotor-frame currents, active-frame currents. Terminal switches
/// are marked with vertical lines. Returns the written file paths.
std::vector<std::string> emit_plots(const Trace& trace, const std::string& out_dir);

}  // namespace csifoc
