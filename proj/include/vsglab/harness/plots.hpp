#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vsglab/harness/metrics.hpp"

namespace vsglab::harness {

inline constexpr std::size_t kMaxPlotPoints = 5000;

// Evenly spaced indices into [0, n) that keep both end points; at most
// max_points of them.
std::vector<std::size_t> downsample_indices(std::size_t n, std::size_t max_points = kMaxPlotPoints);

// Writes <channel>_full.svg and <channel>_zoom.svg per channel, overlaying
// every record and the reference of the first one. Returns the paths written.
std::vector<std::string> emit_plots(const std::vector<const RunRecord*>& records,
                                    const std::vector<Channel>& channels, const std::string& dir);

}  // namespace vsglab::harness
