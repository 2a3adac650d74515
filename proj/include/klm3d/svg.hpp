#pragma once

#include <string>

#include "klm3d/stats.hpp"

namespace klm3d {

// Renders a grouped bar chart of mean predicted vs. mean actual trial time
// per modality, annotated with the percent difference. The output is a
// standalone SVG document and is byte-deterministic for a given report.
std::string render_svg_chart(const EvalReport& report);

void save_svg_chart(const EvalReport& report, const std::string& path);

} // namespace klm3d
