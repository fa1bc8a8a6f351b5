#pragma once

#include <string>
#include <vector>

#include "cacm/control.hpp"

/*
 * Line-delimited trajectory logs: one JSON record per iteration with a fixed
 * field layout. The logs are the single source of truth for every statistics
 * table; the readers below reconstruct observations from residuals and the
 * requirement set.
 */

namespace cacm {

std::string to_json_line(const IterationRecord& record);
IterationRecord record_from_json_line(const std::string& line);

std::string serialize_trajectory(const std::vector<IterationRecord>& trajectory);
std::vector<IterationRecord> read_trajectory_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Inverts the residual orientation: GE/GT observed = residual + threshold,
// LE/LT observed = threshold - residual.
std::vector<Observation> observations_from(const IterationRecord& record,
                                           const RequirementSet& reqs);

}  // namespace cacm
