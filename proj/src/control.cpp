#include "cacm/control.hpp"

#include <algorithm>
#include <cstdio>

#include "cacm/rng.hpp"

namespace cacm {

std::string to_token(Mode mode) {
  switch (mode) {
    case Mode::Cacm: return "cacm";
    case Mode::RawBaseline: return "raw";
    case Mode::RepairSignalOnly: return "repair-only";
    case Mode::NoCorrectiveSelection: return "no-corr-select";
    case Mode::NoDynamicCompression: return "no-dyn-compress";
  }
  return "cacm";
}

Mode mode_from_token(const std::string& token) {
  if (token == "cacm") return Mode::Cacm;
  if (token == "raw") return Mode::RawBaseline;
  if (token == "repair-only") return Mode::RepairSignalOnly;
  if (token == "no-corr-select") return Mode::NoCorrectiveSelection;
  if (token == "no-dyn-compress") return Mode::NoDynamicCompression;
  throw ConfigError("unknown mode token: " + token);
}

std::string describe_action(const Action& action) {
  switch (action.kind) {
    case ActionBias::Generate:
      return "generate " + std::to_string(action.sample_count) + " fresh candidates";
    case ActionBias::Optimize:
      return "optimize " + (action.pool_ids.empty() ? std::string("?") : action.pool_ids.front()) +
             " toward " + action.objective_field;
    case ActionBias::CodeScreen:
      return "screen " + (action.pool_ids.empty() ? std::string("?") : action.pool_ids.front()) +
             " through the per-molecule thresholds into a diverse subset of " +
             std::to_string(action.subset_size);
  }
  return "";
}

bool PoolRegistry::contains(const std::string& id) const {
  for (const CandidatePool& pool : pools_) {
    if (pool.id == id) return true;
  }
  return false;
}

const CandidatePool& PoolRegistry::at(const std::string& id) const {
  for (const CandidatePool& pool : pools_) {
    if (pool.id == id) return pool;
  }
  throw ExecutionError("unknown pool id: " + id);
}

std::string PoolRegistry::next_id() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "MOL%03zu", pools_.size() + 1);
  return buf;
}

void PoolRegistry::add(CandidatePool pool) {
  if (contains(pool.id)) throw ExecutionError("pool id already registered: " + pool.id);
  pools_.push_back(std::move(pool));
}

WriteBackPolicy mode_wiring(Mode mode) {
  WriteBackPolicy p;
  switch (mode) {
    case Mode::Cacm:
      break;
    case Mode::RawBaseline:
      p.structured = false;
      p.append_diagnosis = false;
      break;
    case Mode::RepairSignalOnly:
      p.structured = false;
      p.append_diagnosis = true;
      break;
    case Mode::NoCorrectiveSelection:
      p.corrective_selection = false;
      break;
    case Mode::NoDynamicCompression:
      p.dynamic_selection = false;
      p.dynamic_char_budget = false;
      break;
  }
  return p;
}

namespace {

std::string evaluation_summary(const AuditReport& report) {
  if (report.passed) return "Evaluation: pass=true";
  std::string out = "Evaluation: pass=false failed:";
  for (size_t i = 0; i < report.failed_labels.size(); ++i) {
    out += (i ? ", " : " ") + report.failed_labels[i];
  }
  return out;
}

}  // namespace

std::string raw_history_append(const std::string& history, const EpisodeContext& ctx,
                               int iteration, const Action& action, const std::string& pool_id,
                               const AuditReport& report, const std::string& diagnosis_text) {
  std::string out = history;
  if (out.empty()) {
    out += "Initial task: design a candidate pool for target " + ctx.target_id + ".\n";
    out += "requirements:";
    for (const Requirement& req : ctx.requirements.requirements) {
      out += "\n" + render_requirement_line(req);
    }
    out += "\nAvailable actions: generate, optimize, code_screen.\n";
  }
  out += "\n=== Iteration " + std::to_string(iteration) + " ===\n";
  out += "Planner response: " + describe_action(action) + ".\n";
  out += "Action: " + to_token(action.kind) + " -> " + pool_id + "\n";
  out += evaluation_summary(report) + "\n";
  if (!diagnosis_text.empty()) {
    out += "Diagnosis:\n" + diagnosis_text + "\n";
  }
  return out;
}

namespace {

const CandidatePool* best_pool_by_quality(const PoolRegistry& registry,
                                          const RequirementSet& reqs) {
  const CandidatePool* best = nullptr;
  double best_score = -1.0;
  for (const CandidatePool& pool : registry.pools()) {
    const double score = make_pool_summary(pool, reqs, pool.created_at_iteration).quality_score;
    if (!best || score >= best_score) {  // later pool wins ties
      best = &pool;
      best_score = score;
    }
  }
  return best;
}

}  // namespace

EpisodeResult run_episode(const EpisodeContext& ctx, const Planner& planner,
                          const Executor& executor, const LoopConfig& config,
                          const PlannerInputObserver& observer) {
  validate(ctx.requirements);
  const WriteBackPolicy policy = mode_wiring(config.mode);

  EpisodeResult result;
  PoolRegistry registry;
  const StaticMemory static_mem = build_static(ctx.target_id, ctx.requirements, ctx.pocket);
  DynamicMemory dynamic_mem;
  CorrectiveMemory corrective_mem;
  std::string raw_history;
  std::optional<CandidatePool> first_pass;

  for (int k = 1; k <= config.max_iterations; ++k) {
    std::string input_text;
    int static_chars = 0, dynamic_chars = 0, corrective_chars = 0;
    if (policy.structured) {
      std::string s_txt = render_static(static_mem, config.budgets.b_s);
      std::string d_txt = render_dynamic(
          dynamic_mem, policy.dynamic_char_budget ? config.budgets.b_d : kUnboundedBudget);
      std::string c_txt = render_corrective(corrective_mem, config.budgets.b_c);
      static_chars = static_cast<int>(s_txt.size());
      dynamic_chars = static_cast<int>(d_txt.size());
      corrective_chars = static_cast<int>(c_txt.size());
      input_text = adapt(std::move(s_txt), std::move(d_txt), std::move(c_txt)).text();
    } else {
      input_text = raw_history;
    }
    if (observer) observer(k, input_text);

    Action action;
    CandidatePool pool;
    try {
      action = planner(input_text, registry, derive_seed(config.seed, 9000 + k));
      pool = executor(action, registry, registry.next_id(), derive_seed(config.seed, k));
      pool.created_at_iteration = k;
      registry.add(std::move(pool));
    } catch (const std::exception& e) {
      result.aborted = true;
      result.abort_reason = e.what();
      result.iterations_used = k - 1;
      return result;  // partial trajectory: completed iterations only
    }

    const CandidatePool& produced = registry.pools().back();
    AuditReport report;
    try {
      report = gate(produced, ctx.requirements);
    } catch (const std::exception& e) {
      // An output the audit cannot evaluate counts as an executor failure.
      result.aborted = true;
      result.abort_reason = e.what();
      result.iterations_used = k - 1;
      return result;
    }

    IterationRecord rec;
    rec.iteration = k;
    rec.action_kind = action.kind;
    rec.pool_id = produced.id;
    rec.passed = report.passed;
    rec.failed_labels = report.failed_labels;
    rec.residuals = report.residuals;
    rec.state_chars = static_cast<int>(input_text.size());
    rec.static_chars = static_chars;
    rec.dynamic_chars = dynamic_chars;
    rec.corrective_chars = corrective_chars;

    std::optional<CorrectiveRecord> corrective;
    if (!report.passed) {
      corrective = diagnose(ctx.requirements, produced, report, k);
      rec.corrective = corrective;
    }
    result.trajectory.push_back(std::move(rec));

    if (report.passed && !config.full_horizon) {
      result.success = true;
      result.returned_pool = produced;
      result.iterations_used = k;
      return result;
    }
    if (report.passed && !first_pass) first_pass = produced;

    if (policy.structured) {
      const PoolSummary summary = make_pool_summary(produced, ctx.requirements, k);
      const ActionRecord action_rec{k, action.kind, produced.id, report.passed};
      if (policy.dynamic_selection) {
        dynamic_mem = update_dynamic(dynamic_mem, summary, action_rec, config.budgets);
      } else {
        dynamic_mem.pools.push_back(summary);
        dynamic_mem.actions.push_back(action_rec);
        while (static_cast<int>(dynamic_mem.actions.size()) > config.budgets.w_d) {
          dynamic_mem.actions.erase(dynamic_mem.actions.begin());
        }
      }
      if (corrective) {
        if (policy.corrective_selection) {
          corrective_mem = update_corrective(corrective_mem, *corrective, config.budgets);
        } else {
          corrective_mem.records.push_back(*corrective);
        }
      }
    } else {
      raw_history = raw_history_append(
          raw_history, ctx, k, action, produced.id, report,
          policy.append_diagnosis && corrective ? render_corrective_record(*corrective) : "");
    }
  }

  result.iterations_used = config.max_iterations;
  if (config.full_horizon && first_pass) {
    result.success = true;
    result.returned_pool = *first_pass;
    return result;
  }
  result.success = false;
  if (const CandidatePool* best = best_pool_by_quality(registry, ctx.requirements)) {
    result.returned_pool = *best;
  }
  return result;
}

}  // namespace cacm
