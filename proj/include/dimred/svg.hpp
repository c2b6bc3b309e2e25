#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dimred/embed.hpp"

namespace dimred {

/// Self-contained scatter plot of the first two embedding coordinates.
/// Points are colored by label through a fixed 20-color cycle (single color
/// when unlabeled); axes autoscale with 5% margins. Byte output is
/// deterministic for identical input.
void render_scatter_svg(const Embedding& embedding, const std::optional<std::vector<int>>& labels,
                        const std::string& path, int width = 800, int height = 600);

} // namespace dimred
