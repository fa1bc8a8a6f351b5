#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cacm/diagnosis.hpp"
#include "cacm/protocol.hpp"

/*
 * The three-channel planner-facing memory: static construction, dynamic and
 * corrective updates with ranked bounded selection, deterministic template
 * rendering under character budgets, and adaptation into the agent state.
 * All updates are functional (old value in, new value out).
 */

namespace cacm {

struct MemoryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Budgets {
  int k_d = 4;     // retained pool summaries
  int w_d = 3;     // recent-action window
  int k_c = 3;     // retained corrective entries
  int b_s = 1400;  // character budgets per channel
  int b_d = 1800;
  int b_c = 1200;
};

// Opaque key/value record describing the receptor pocket; rendered verbatim.
struct PocketSummary {
  std::vector<std::pair<std::string, std::string>> entries;
};

struct StaticMemory {
  std::string target_id;
  RequirementSet requirements;
  PocketSummary pocket;
};

struct PoolSummary {
  std::string pool_id;
  int iteration = 0;
  int size = 0;
  double diversity = 0.0;
  double worst_docking = 0.0;
  double min_novelty = 0.0;
  double min_qed = 0.0;
  double max_sas = 0.0;
  double min_lipinski = 0.0;
  double quality_score = 0.0;
};

struct ActionRecord {
  int iteration = 0;
  ActionBias action = ActionBias::Generate;
  std::string pool_id;
  bool passed = false;
};

struct DynamicMemory {
  std::vector<PoolSummary> pools;
  std::vector<ActionRecord> actions;
};

struct CorrectiveMemory {
  std::vector<CorrectiveRecord> records;
};

struct AgentState {
  std::string static_text;
  std::string dynamic_text;
  std::string corrective_text;
  int total_chars = 0;

  // Planner-facing assembly: the three labeled channels in fixed order.
  std::string text() const;
};

// Pass to render functions to lift a channel's character budget entirely.
inline constexpr int kUnboundedBudget = 1 << 30;

StaticMemory build_static(const std::string& target_id, const RequirementSet& requirements,
                          const PocketSummary& pocket);

// Equal-weight mean of per-requirement satisfaction ratios clipped to [0,1].
// Larger-is-better requirements use clip(o/b), smaller-is-better use
// clip(b/o) with sign-safe handling when the threshold is negative; a zero
// threshold falls back to the residual with scale floor 1.
double quality_score(const std::vector<Observation>& observations, const RequirementSet& reqs);

// Summary statistics computed with the same aggregations the audit uses.
PoolSummary make_pool_summary(const CandidatePool& pool, const RequirementSet& reqs, int iteration);

// Append both entries, then select: summaries ranked by (quality_score
// desc, iteration desc) and cut to K_d, actions cut to the W_d most recent.
DynamicMemory update_dynamic(const DynamicMemory& prev, const PoolSummary& summary,
                             const ActionRecord& action, const Budgets& budgets);

// Append, deduplicate by (family, failed_labels, repair_hint) keeping the
// higher-severity / later copy, rank by (severity desc, iteration desc),
// cut to K_c. Callers invoke this only after a failed audit.
CorrectiveMemory update_corrective(const CorrectiveMemory& prev, const CorrectiveRecord& record,
                                   const Budgets& budgets);

std::string render_requirement_line(const Requirement& req);
std::string render_corrective_record(const CorrectiveRecord& record);

std::string render_static(const StaticMemory& mem, int budget);
std::string render_dynamic(const DynamicMemory& mem, int budget);
std::string render_corrective(const CorrectiveMemory& mem, int budget);

// Whole-line truncation with a trailing "[truncated]" marker; the result
// never exceeds the budget. Budgets below 64 are rejected.
std::string truncate_to_budget(const std::string& text, int budget);

AgentState adapt(std::string static_text, std::string dynamic_text, std::string corrective_text);

}  // namespace cacm
