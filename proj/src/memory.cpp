#include "cacm/memory.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>

namespace cacm {

namespace {

double clip01(double x) {
  if (x < 0.0) return 0.0;
  if (x > 1.0) return 1.0;
  return x;
}

// Satisfaction ratio for one requirement, oriented so that 1 means the
// threshold is met with margin. Zero thresholds use the residual with the
// same scale floor the severity formula uses.
double indicator_ratio(double observation, double threshold, bool larger_better) {
  if (threshold == 0.0) {
    const double r = larger_better ? observation : -observation;
    return clip01(1.0 + r);
  }
  if (larger_better) {
    if (threshold > 0.0) return clip01(observation / threshold);
    return observation >= 0.0 ? 1.0 : clip01(threshold / observation);
  }
  if (threshold < 0.0) return clip01(observation / threshold);
  return observation > 0.0 ? clip01(threshold / observation) : 1.0;
}

std::optional<double> property_min(const CandidatePool& pool, const std::string& name) {
  std::optional<double> out;
  for (const Molecule& mol : pool.molecules) {
    auto it = mol.properties.find(name);
    if (it == mol.properties.end()) return std::nullopt;
    out = out ? std::min(*out, it->second) : it->second;
  }
  return out;
}

std::optional<double> property_max(const CandidatePool& pool, const std::string& name) {
  std::optional<double> out;
  for (const Molecule& mol : pool.molecules) {
    auto it = mol.properties.find(name);
    if (it == mol.properties.end()) return std::nullopt;
    out = out ? std::max(*out, it->second) : it->second;
  }
  return out;
}

}  // namespace

std::string AgentState::text() const {
  return "== STATIC ==\n" + static_text + "\n== DYNAMIC ==\n" + dynamic_text +
         "\n== CORRECTIVE ==\n" + corrective_text;
}

StaticMemory build_static(const std::string& target_id, const RequirementSet& requirements,
                          const PocketSummary& pocket) {
  if (target_id.empty()) throw MemoryError("static memory needs a target id");
  if (requirements.requirements.empty()) {
    throw MemoryError("static memory needs a non-empty requirement set");
  }
  return StaticMemory{target_id, requirements, pocket};
}

double quality_score(const std::vector<Observation>& observations, const RequirementSet& reqs) {
  if (reqs.requirements.empty()) return 0.0;
  double sum = 0.0;
  for (const Requirement& req : reqs.requirements) {
    double obs = 0.0;
    bool found = false;
    for (const Observation& o : observations) {
      if (o.label == req.label) {
        obs = o.value;
        found = true;
        break;
      }
    }
    if (!found) throw MemoryError("quality_score is missing an observation for '" + req.label + "'");
    const bool larger_better =
        req.comparison == Comparison::Ge || req.comparison == Comparison::Gt;
    sum += indicator_ratio(obs, req.threshold, larger_better);
  }
  return sum / static_cast<double>(reqs.requirements.size());
}

PoolSummary make_pool_summary(const CandidatePool& pool, const RequirementSet& reqs,
                              int iteration) {
  PoolSummary s;
  s.pool_id = pool.id;
  s.iteration = iteration;
  s.size = static_cast<int>(pool.molecules.size());
  s.diversity = pool.molecules.size() < 2 ? 0.0 : diversity(pool);
  s.worst_docking = property_max(pool, "docking").value_or(0.0);
  s.min_novelty = property_min(pool, "novelty").value_or(0.0);
  s.min_qed = property_min(pool, "qed").value_or(0.0);
  s.max_sas = property_max(pool, "sas").value_or(0.0);
  s.min_lipinski = property_min(pool, "lipinski").value_or(0.0);

  std::vector<Observation> obs;
  obs.reserve(reqs.requirements.size());
  bool evaluable = true;
  for (const Requirement& req : reqs.requirements) {
    try {
      obs.push_back(aggregate(pool, req));
    } catch (const AuditError&) {
      evaluable = false;
      break;
    }
  }
  s.quality_score = evaluable ? quality_score(obs, reqs) : 0.0;
  return s;
}

DynamicMemory update_dynamic(const DynamicMemory& prev, const PoolSummary& summary,
                             const ActionRecord& action, const Budgets& budgets) {
  DynamicMemory next = prev;
  next.pools.push_back(summary);
  next.actions.push_back(action);

  std::stable_sort(next.pools.begin(), next.pools.end(),
                   [](const PoolSummary& a, const PoolSummary& b) {
                     if (a.quality_score != b.quality_score) {
                       return a.quality_score > b.quality_score;
                     }
                     return a.iteration > b.iteration;
                   });
  if (static_cast<int>(next.pools.size()) > budgets.k_d) next.pools.resize(budgets.k_d);

  std::stable_sort(next.actions.begin(), next.actions.end(),
                   [](const ActionRecord& a, const ActionRecord& b) {
                     return a.iteration < b.iteration;
                   });
  while (static_cast<int>(next.actions.size()) > budgets.w_d) {
    next.actions.erase(next.actions.begin());
  }
  return next;
}

CorrectiveMemory update_corrective(const CorrectiveMemory& prev, const CorrectiveRecord& record,
                                   const Budgets& budgets) {
  std::vector<CorrectiveRecord> all = prev.records;
  all.push_back(record);

  // Content-level dedup: identical (family, failed labels, hint) keeps the
  // higher-severity, later copy.
  std::vector<CorrectiveRecord> unique;
  for (const CorrectiveRecord& rec : all) {
    bool merged = false;
    for (CorrectiveRecord& kept : unique) {
      if (kept.family == rec.family && kept.failed_labels == rec.failed_labels &&
          kept.repair_hint == rec.repair_hint) {
        if (std::tie(rec.severity, rec.iteration) > std::tie(kept.severity, kept.iteration)) {
          kept = rec;
        }
        merged = true;
        break;
      }
    }
    if (!merged) unique.push_back(rec);
  }

  std::stable_sort(unique.begin(), unique.end(),
                   [](const CorrectiveRecord& a, const CorrectiveRecord& b) {
                     if (a.severity != b.severity) return a.severity > b.severity;
                     return a.iteration > b.iteration;
                   });
  if (static_cast<int>(unique.size()) > budgets.k_c) unique.resize(budgets.k_c);
  return CorrectiveMemory{std::move(unique)};
}

std::string render_requirement_line(const Requirement& req) {
  const std::string field =
      req.field == MetricField::Custom ? "custom:" + req.custom_name : to_token(req.field);
  return "  [req] " + req.label + ": " + field + " " + to_token(req.aggregation) + " " +
         to_token(req.comparison) + " " + fmt_shortest(req.threshold);
}

std::string render_corrective_record(const CorrectiveRecord& record) {
  std::string failed;
  for (size_t i = 0; i < record.failed_labels.size(); ++i) {
    if (i) failed += ", ";
    failed += record.failed_labels[i];
  }
  std::string out = "[corr] iter=" + std::to_string(record.iteration) +
                    " family=" + to_token(record.family) +
                    " severity=" + fmt_fixed(record.severity, 4) +
                    " bias=" + to_token(record.bias);
  out += "\n  failed: " + failed;
  out += "\n  rationale: " + record.rationale;
  out += "\n  hint: " + record.repair_hint;
  return out;
}

std::string render_static(const StaticMemory& mem, int budget) {
  std::string out = "target: " + mem.target_id + "\nrequirements:";
  for (const Requirement& req : mem.requirements.requirements) {
    out += "\n" + render_requirement_line(req);
  }
  if (!mem.pocket.entries.empty()) {
    out += "\npocket:";
    for (const auto& [key, value] : mem.pocket.entries) {
      out += "\n  " + key + ": " + value;
    }
  }
  return truncate_to_budget(out, budget);
}

std::string render_dynamic(const DynamicMemory& mem, int budget) {
  std::string out;
  if (!mem.pools.empty()) {
    out += "pools:";
    for (const PoolSummary& p : mem.pools) {
      out += "\n  [pool] " + p.pool_id + " iter=" + std::to_string(p.iteration) +
             " score=" + fmt_fixed(p.quality_score, 4) + " size=" + std::to_string(p.size) +
             " dvs=" + fmt_fixed(p.diversity, 4) + " vina=" + fmt_fixed(p.worst_docking, 4) +
             " nov=" + fmt_fixed(p.min_novelty, 4) + " qed=" + fmt_fixed(p.min_qed, 4) +
             " sas=" + fmt_fixed(p.max_sas, 4) + " lip=" + fmt_fixed(p.min_lipinski, 4);
    }
  }
  if (!mem.actions.empty()) {
    if (!out.empty()) out += "\n";
    out += "actions:";
    for (const ActionRecord& a : mem.actions) {
      out += "\n  [act] iter=" + std::to_string(a.iteration) + " " + to_token(a.action) +
             " -> " + a.pool_id + " pass=" + (a.passed ? "true" : "false");
    }
  }
  return truncate_to_budget(out, budget);
}

std::string render_corrective(const CorrectiveMemory& mem, int budget) {
  std::string out;
  for (size_t i = 0; i < mem.records.size(); ++i) {
    if (i) out += "\n";
    out += render_corrective_record(mem.records[i]);
  }
  return truncate_to_budget(out, budget);
}

std::string truncate_to_budget(const std::string& text, int budget) {
  if (budget < 64) throw MemoryError("channel budget below the 64-character floor");
  if (static_cast<int>(text.size()) <= budget) return text;

  static const std::string kMarker = "[truncated]";
  std::string kept;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const size_t line_len = eol - pos;
    const size_t projected =
        kept.size() + (kept.empty() ? 0 : 1) + line_len + 1 + kMarker.size();
    if (projected > static_cast<size_t>(budget)) break;
    if (!kept.empty()) kept += "\n";
    kept.append(text, pos, line_len);
    pos = eol + 1;
  }
  if (kept.empty()) return kMarker;
  return kept + "\n" + kMarker;
}

AgentState adapt(std::string static_text, std::string dynamic_text, std::string corrective_text) {
  AgentState state;
  state.static_text = std::move(static_text);
  state.dynamic_text = std::move(dynamic_text);
  state.corrective_text = std::move(corrective_text);
  state.total_chars = static_cast<int>(state.text().size());
  return state;
}

}  // namespace cacm
