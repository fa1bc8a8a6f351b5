#include "cacm/trajectory.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cacm {

using ordered_json = nlohmann::ordered_json;

std::string to_json_line(const IterationRecord& record) {
  ordered_json j;
  j["iteration"] = record.iteration;
  j["action_kind"] = to_token(record.action_kind);
  j["pool_id"] = record.pool_id;
  j["passed"] = record.passed;
  j["failed_labels"] = record.failed_labels;
  ordered_json residuals = ordered_json::object();
  for (const ResidualEntry& entry : record.residuals) {
    residuals[entry.label] = entry.value;
  }
  j["residuals"] = residuals;
  if (record.corrective) {
    j["severity"] = record.corrective->severity;
    j["family"] = to_token(record.corrective->family);
    j["bias"] = to_token(record.corrective->bias);
  }
  j["state_chars"] = record.state_chars;
  j["channel_chars"] = {{"static", record.static_chars},
                        {"dynamic", record.dynamic_chars},
                        {"corrective", record.corrective_chars}};
  return j.dump();
}

IterationRecord record_from_json_line(const std::string& line) {
  const ordered_json j = ordered_json::parse(line);
  IterationRecord rec;
  rec.iteration = j.at("iteration").get<int>();
  rec.action_kind = bias_from_token(j.at("action_kind").get<std::string>());
  rec.pool_id = j.at("pool_id").get<std::string>();
  rec.passed = j.at("passed").get<bool>();
  rec.failed_labels = j.at("failed_labels").get<std::vector<std::string>>();
  for (const auto& [label, value] : j.at("residuals").items()) {
    rec.residuals.push_back({label, value.get<double>()});
  }
  if (j.contains("severity")) {
    CorrectiveRecord corr;
    corr.iteration = rec.iteration;
    corr.severity = j.at("severity").get<double>();
    corr.failed_labels = rec.failed_labels;
    const std::string family = j.at("family").get<std::string>();
    for (int f = 0; f < 6; ++f) {
      if (to_token(static_cast<FailureFamily>(f)) == family) {
        corr.family = static_cast<FailureFamily>(f);
      }
    }
    corr.bias = bias_from_token(j.at("bias").get<std::string>());
    rec.corrective = std::move(corr);
  }
  rec.state_chars = j.at("state_chars").get<int>();
  const auto& chars = j.at("channel_chars");
  rec.static_chars = chars.at("static").get<int>();
  rec.dynamic_chars = chars.at("dynamic").get<int>();
  rec.corrective_chars = chars.at("corrective").get<int>();
  return rec;
}

std::string serialize_trajectory(const std::vector<IterationRecord>& trajectory) {
  std::string out;
  for (const IterationRecord& record : trajectory) {
    out += to_json_line(record);
    out += "\n";
  }
  return out;
}

std::vector<IterationRecord> read_trajectory_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trajectory log: " + path);
  std::vector<IterationRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) records.push_back(record_from_json_line(line));
  }
  return records;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
}

std::vector<Observation> observations_from(const IterationRecord& record,
                                           const RequirementSet& reqs) {
  std::vector<Observation> out;
  out.reserve(reqs.requirements.size());
  for (const Requirement& req : reqs.requirements) {
    double residual_value = 0.0;
    bool found = false;
    for (const ResidualEntry& entry : record.residuals) {
      if (entry.label == req.label) {
        residual_value = entry.value;
        found = true;
        break;
      }
    }
    if (!found) throw ConfigError("trajectory record lacks residual for '" + req.label + "'");
    const bool larger = req.comparison == Comparison::Ge || req.comparison == Comparison::Gt;
    out.push_back({req.label, larger ? residual_value + req.threshold
                                     : req.threshold - residual_value});
  }
  return out;
}

}  // namespace cacm
