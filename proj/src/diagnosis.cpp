#include "cacm/diagnosis.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cacm {

namespace {

constexpr double kMinViolationSeverity = 1e-12;

bool violated(const Requirement& req, double residual_value) {
  if (req.comparison == Comparison::Gt || req.comparison == Comparison::Lt) {
    return residual_value <= 0.0;
  }
  return residual_value < 0.0;
}

double contribution(const Requirement& req, double residual_value) {
  const double scale = std::max(std::abs(req.threshold), 1.0);
  return std::max(std::abs(residual_value) / scale, kMinViolationSeverity);
}

void check_alignment(const ResidualVector& residuals, const RequirementSet& reqs) {
  if (residuals.size() != reqs.requirements.size()) {
    throw DiagnosisError("residual vector and requirement set differ in length");
  }
  for (size_t i = 0; i < residuals.size(); ++i) {
    if (residuals[i].label != reqs.requirements[i].label) {
      throw DiagnosisError("residual vector is misaligned at label '" + residuals[i].label + "'");
    }
  }
}

}  // namespace

std::string to_token(FailureFamily family) {
  switch (family) {
    case FailureFamily::SizeDeficit: return "size_deficit";
    case FailureFamily::DiversityCollapse: return "diversity_collapse";
    case FailureFamily::BindingBottleneck: return "binding_bottleneck";
    case FailureFamily::DevelopabilityViolation: return "developability_violation";
    case FailureFamily::NoveltyDeficit: return "novelty_deficit";
    case FailureFamily::Mixed: return "mixed";
  }
  return "mixed";
}

std::string to_token(ActionBias bias) {
  switch (bias) {
    case ActionBias::Generate: return "generate";
    case ActionBias::Optimize: return "optimize";
    case ActionBias::CodeScreen: return "code_screen";
  }
  return "optimize";
}

ActionBias bias_from_token(const std::string& token) {
  if (token == "generate") return ActionBias::Generate;
  if (token == "optimize") return ActionBias::Optimize;
  if (token == "code_screen") return ActionBias::CodeScreen;
  throw DiagnosisError("unknown bias token: " + token);
}

FailureFamily family_of(MetricField field) {
  switch (field) {
    case MetricField::PoolSize: return FailureFamily::SizeDeficit;
    case MetricField::Diversity: return FailureFamily::DiversityCollapse;
    case MetricField::Docking: return FailureFamily::BindingBottleneck;
    case MetricField::Novelty: return FailureFamily::NoveltyDeficit;
    case MetricField::Qed:
    case MetricField::Sas:
    case MetricField::Lipinski:
    case MetricField::Custom:
      return FailureFamily::DevelopabilityViolation;
  }
  return FailureFamily::Mixed;
}

double severity(const ResidualVector& residuals, const RequirementSet& reqs) {
  check_alignment(residuals, reqs);
  double total = 0.0;
  for (size_t i = 0; i < residuals.size(); ++i) {
    const Requirement& req = reqs.requirements[i];
    if (violated(req, residuals[i].value)) {
      total += contribution(req, residuals[i].value);
    }
  }
  return total;
}

FailureFamily classify_family(const ResidualVector& residuals, const RequirementSet& reqs) {
  check_alignment(residuals, reqs);

  std::array<double, 6> sums{};
  double total = 0.0;
  bool any = false;
  for (size_t i = 0; i < residuals.size(); ++i) {
    const Requirement& req = reqs.requirements[i];
    if (!violated(req, residuals[i].value)) continue;
    const double c = contribution(req, residuals[i].value);
    sums[static_cast<size_t>(family_of(req.field))] += c;
    total += c;
    any = true;
  }
  if (!any) throw DiagnosisError("classify_family called without a violation");

  // Argmax over family sums; a tie keeps the family listed first. The
  // winner must carry at least half the total severity, otherwise no single
  // family dominates and the failure is Mixed.
  size_t best = 0;
  for (size_t f = 1; f < sums.size(); ++f) {
    if (sums[f] > sums[best]) best = f;
  }
  if (sums[best] >= 0.5 * total) return static_cast<FailureFamily>(best);
  return FailureFamily::Mixed;
}

int compliant_count(const CandidatePool& pool, const RequirementSet& reqs) {
  int count = 0;
  for (const Molecule& mol : pool.molecules) {
    bool ok = true;
    for (const Requirement& req : reqs.requirements) {
      if (!is_per_molecule(req)) continue;
      auto it = mol.properties.find(property_name(req));
      if (it == mol.properties.end() || !comparison_holds(req.comparison, it->second, req.threshold)) {
        ok = false;
        break;
      }
    }
    if (ok) ++count;
  }
  return count;
}

int required_pool_size(const RequirementSet& reqs) {
  for (const Requirement& req : reqs.requirements) {
    if (req.field != MetricField::PoolSize) continue;
    if (req.comparison == Comparison::Gt) return static_cast<int>(std::floor(req.threshold)) + 1;
    return static_cast<int>(std::ceil(req.threshold));
  }
  return 1;
}

namespace {

const Requirement* dominant_violation(const ResidualVector& residuals, const RequirementSet& reqs,
                                      double* dominant_residual) {
  const Requirement* best = nullptr;
  double best_c = -1.0;
  for (size_t i = 0; i < residuals.size(); ++i) {
    const Requirement& req = reqs.requirements[i];
    if (!violated(req, residuals[i].value)) continue;
    const double c = contribution(req, residuals[i].value);
    if (c > best_c) {
      best_c = c;
      best = &req;
      if (dominant_residual) *dominant_residual = residuals[i].value;
    }
  }
  return best;
}

double observation_of(const AuditReport& report, const std::string& label) {
  for (const Observation& obs : report.observations) {
    if (obs.label == label) return obs.value;
  }
  return 0.0;
}

std::string field_token(const Requirement& req) {
  if (req.field == MetricField::Custom) return "custom:" + req.custom_name;
  return to_token(req.field);
}

}  // namespace

CorrectiveRecord diagnose(const RequirementSet& reqs, const CandidatePool& pool,
                          const AuditReport& report, int iteration) {
  if (report.passed) throw DiagnosisError("diagnose called on a passing audit");

  CorrectiveRecord rec;
  rec.iteration = iteration;
  rec.severity = severity(report.residuals, reqs);
  rec.family = classify_family(report.residuals, reqs);
  rec.failed_labels = report.failed_labels;

  double dom_residual = 0.0;
  const Requirement* dom = dominant_violation(report.residuals, reqs, &dom_residual);
  const double dom_obs = dom ? observation_of(report, dom->label) : 0.0;
  const std::string dom_field = dom ? field_token(*dom) : "docking";

  rec.rationale = "dominant=" + dom_field + " worst=" + fmt_fixed(dom_obs, 4) +
                  " threshold=" + (dom ? fmt_shortest(dom->threshold) : "0");

  const int needed = required_pool_size(reqs);
  const int compliant = compliant_count(pool, reqs);
  const int pool_n = static_cast<int>(pool.molecules.size());
  const std::string pool_ref = "pool " + pool.id;

  switch (rec.family) {
    case FailureFamily::SizeDeficit:
      rec.bias = ActionBias::Generate;
      rec.repair_hint = pool_ref + " holds only " + std::to_string(pool_n) +
                        " molecules against the required " + std::to_string(needed) +
                        "; generate additional candidates and recheck the full protocol.";
      break;
    case FailureFamily::DiversityCollapse:
      rec.bias = ActionBias::Generate;
      rec.repair_hint = pool_ref + " diversity " + fmt_fixed(dom_obs, 4) + " sits below " +
                        (dom ? fmt_shortest(dom->threshold) : "the threshold") +
                        "; generate a fresh batch to restore spread before refining.";
      break;
    case FailureFamily::NoveltyDeficit:
      rec.bias = ActionBias::Generate;
      rec.repair_hint = pool_ref + " minimum novelty " + fmt_fixed(dom_obs, 4) + " sits below " +
                        (dom ? fmt_shortest(dom->threshold) : "the threshold") +
                        "; generate fresh scaffolds away from the reference set.";
      break;
    case FailureFamily::BindingBottleneck:
      if (compliant >= needed) {
        rec.bias = ActionBias::CodeScreen;
        rec.repair_hint = pool_ref + " already holds " + std::to_string(compliant) + "/" +
                          std::to_string(pool_n) +
                          " molecules that satisfy every per-molecule threshold; filter by the "
                          "per-molecule constraints, then construct a diverse subset with at least " +
                          std::to_string(needed) + " molecules.";
      } else {
        rec.bias = ActionBias::Optimize;
        rec.repair_hint = pool_ref + " worst " + dom_field + " " + fmt_fixed(dom_obs, 4) +
                          " misses " + (dom ? fmt_shortest(dom->threshold) : "the threshold") +
                          " and only " + std::to_string(compliant) + "/" + std::to_string(pool_n) +
                          " molecules clear every per-molecule threshold; optimize the pool "
                          "toward stronger binding.";
      }
      break;
    case FailureFamily::DevelopabilityViolation:
      rec.bias = ActionBias::Optimize;
      rec.repair_hint = pool_ref + " worst " + dom_field + " " + fmt_fixed(dom_obs, 4) +
                        " violates its threshold " +
                        (dom ? fmt_shortest(dom->threshold) : "") +
                        "; optimize that property while holding the rest of the pool steady.";
      break;
    case FailureFamily::Mixed:
      rec.bias = ActionBias::Optimize;
      rec.repair_hint = pool_ref + " violates " + std::to_string(rec.failed_labels.size()) +
                        " requirements with no dominant family; optimize the worst offender " +
                        dom_field + " first and re-audit.";
      break;
  }
  return rec;
}

}  // namespace cacm
