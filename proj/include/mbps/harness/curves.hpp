#pragma once

#include <string>
#include <vector>

namespace mbps::harness {

// Percentile with linear interpolation between order statistics.
double percentile(std::vector<double> values, double p);

// For every (variant, prior) group under results_dir, writes
// curves/<group>.csv with columns episode, interaction_s, median, p25, p75
// of best-reward-so-far across replicates. Returns the written paths;
// throws if no completed run is found.
std::vector<std::string> emit_curves(const std::string& results_dir);

} // namespace mbps::harness
