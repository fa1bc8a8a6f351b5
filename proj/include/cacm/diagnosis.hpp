#pragma once

#include <string>
#include <vector>

#include "cacm/protocol.hpp"

/*
 * Rule-based diagnosis of a failed audit. Deterministic stand-in for an
 * LLM-backed diagnoser behind the same contract: a failed report goes in, a
 * corrective record (failure family, severity, repair hint, next-action
 * bias) comes out.
 */

namespace cacm {

enum class FailureFamily {
  SizeDeficit,
  DiversityCollapse,
  BindingBottleneck,
  DevelopabilityViolation,
  NoveltyDeficit,
  Mixed,
};

enum class ActionBias { Generate, Optimize, CodeScreen };

struct DiagnosisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CorrectiveRecord {
  int iteration = 0;
  FailureFamily family = FailureFamily::Mixed;
  double severity = 0.0;
  std::vector<std::string> failed_labels;
  std::string rationale;
  std::string repair_hint;
  ActionBias bias = ActionBias::Optimize;
};

std::string to_token(FailureFamily family);
std::string to_token(ActionBias bias);
ActionBias bias_from_token(const std::string& token);

FailureFamily family_of(MetricField field);

// Sum over violated requirements of |residual| / max(|threshold|, 1). Each
// violated contribution is floored at 1e-12 so a strict comparison violated
// exactly at the boundary still yields a positive severity.
double severity(const ResidualVector& residuals, const RequirementSet& reqs);

// Family with the largest severity sum (ties resolved by enumeration
// order); Mixed when that family holds less than half of the total.
FailureFamily classify_family(const ResidualVector& residuals, const RequirementSet& reqs);

// Number of molecules that individually satisfy every per-molecule
// requirement in the set.
int compliant_count(const CandidatePool& pool, const RequirementSet& reqs);

// Smallest pool size satisfying the PoolSize requirement; 1 if there is none.
int required_pool_size(const RequirementSet& reqs);

// Throws DiagnosisError when report.passed is true.
CorrectiveRecord diagnose(const RequirementSet& reqs, const CandidatePool& pool,
                          const AuditReport& report, int iteration);

}  // namespace cacm
