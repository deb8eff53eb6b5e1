#pragma once

// Self-contained SVG rendering of a run's cumulative regret curve with the
// theoretical high-probability bound overlaid as a reference curve.

#include <string>

#include "falcon/sim.hpp"

namespace falcon {

// Render the run's cumulative regret (and the bound evaluated at each logged
// round) into an SVG document. Requires at least two logged rounds.
std::string render_regret_svg(const RunResult& result);

// Render and write to `path`; throws std::runtime_error on I/O failure.
void emit_plot(const RunResult& result, const std::string& path);

}  // namespace falcon
