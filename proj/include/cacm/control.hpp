#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cacm/memory.hpp"

/*
 * The protocol-aware closed loop: per iteration, adapt memory, plan,
 * execute, audit; on failure diagnose and write back; stop at the first
 * passing pool. One episode is strictly sequential; distinct episodes are
 * independent and may run concurrently with their own registries and seeds.
 */

namespace cacm {

struct ExecutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Mode { Cacm, RawBaseline, RepairSignalOnly, NoCorrectiveSelection, NoDynamicCompression };

std::string to_token(Mode mode);
Mode mode_from_token(const std::string& token);

struct Action {
  ActionBias kind = ActionBias::Generate;
  std::vector<std::string> pool_ids;      // sources; empty for Generate
  std::string objective_field;            // Optimize target property token
  int sample_count = 0;                   // Generate batch size
  int subset_size = 0;                    // CodeScreen subset size
  std::vector<Requirement> filters;       // CodeScreen per-molecule filters
};

std::string describe_action(const Action& action);

class PoolRegistry {
 public:
  bool contains(const std::string& id) const;
  const CandidatePool& at(const std::string& id) const;  // throws ExecutionError
  std::string next_id() const;                           // MOL### numbering
  void add(CandidatePool pool);
  const std::vector<CandidatePool>& pools() const { return pools_; }
  bool empty() const { return pools_.empty(); }

 private:
  std::vector<CandidatePool> pools_;
};

// The planner maps the planner-facing text (agent state or raw history) to
// the next action; the executor materializes it under a fresh pool id.
// Both must be deterministic given their seed.
using Planner = std::function<Action(const std::string& state_text, const PoolRegistry& registry,
                                     uint64_t seed)>;
using Executor = std::function<CandidatePool(const Action& action, const PoolRegistry& registry,
                                             const std::string& fresh_pool_id, uint64_t seed)>;

struct LoopConfig {
  int max_iterations = 10;
  Budgets budgets;
  Mode mode = Mode::Cacm;
  uint64_t seed = 1;
  // Disables first-success stopping so every iteration runs; used by the
  // memory-growth measurement. Corrective write-back stays failure-gated.
  bool full_horizon = false;
};

struct IterationRecord {
  int iteration = 0;
  ActionBias action_kind = ActionBias::Generate;
  std::string pool_id;
  bool passed = false;
  std::vector<std::string> failed_labels;
  ResidualVector residuals;
  std::optional<CorrectiveRecord> corrective;
  int state_chars = 0;
  int static_chars = 0;
  int dynamic_chars = 0;
  int corrective_chars = 0;
};

struct EpisodeResult {
  bool success = false;
  CandidatePool returned_pool;
  int iterations_used = 0;
  std::vector<IterationRecord> trajectory;
  bool aborted = false;
  std::string abort_reason;
};

struct EpisodeContext {
  std::string target_id;
  PocketSummary pocket;
  RequirementSet requirements;
};

// Which parts of the write-back pipeline a mode keeps.
struct WriteBackPolicy {
  bool structured = true;          // three labeled channels vs raw history
  bool append_diagnosis = false;   // raw history carries diagnosis text
  bool corrective_selection = true;
  bool dynamic_selection = true;
  bool dynamic_char_budget = true;
};

WriteBackPolicy mode_wiring(Mode mode);

// Appends one iteration block to the raw-history stream (task restatement
// first when the history is empty). Never truncates.
std::string raw_history_append(const std::string& history, const EpisodeContext& ctx,
                               int iteration, const Action& action, const std::string& pool_id,
                               const AuditReport& report, const std::string& diagnosis_text);

// Optional per-iteration hook receiving the exact planner input.
using PlannerInputObserver = std::function<void(int iteration, const std::string& input)>;

EpisodeResult run_episode(const EpisodeContext& ctx, const Planner& planner,
                          const Executor& executor, const LoopConfig& config,
                          const PlannerInputObserver& observer = nullptr);

}  // namespace cacm
