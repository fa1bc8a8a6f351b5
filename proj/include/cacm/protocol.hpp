#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

/*
 * Deterministic returned-set audit: per-requirement aggregation over a
 * candidate pool, the acceptance gate, and signed residuals. Everything in
 * here is a pure function over immutable values; there is no global state,
 * no clock and no randomness, so repeated calls are bit-identical and
 * independent pools can be audited concurrently without coordination.
 */

namespace cacm {

enum class MetricField { PoolSize, Diversity, Novelty, Qed, Sas, Lipinski, Docking, Custom };
enum class AggregationKind { Cardinality, SetFunctional, WorstCaseMin, WorstCaseMax };
enum class Comparison { Ge, Gt, Le, Lt };

struct AuditError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Requirement {
  MetricField field = MetricField::Custom;
  std::string custom_name;  // set only when field == Custom
  AggregationKind aggregation = AggregationKind::WorstCaseMin;
  Comparison comparison = Comparison::Ge;
  double threshold = 0.0;
  std::string label;
};

struct RequirementSet {
  std::string target_id;
  std::vector<Requirement> requirements;
};

// Property maps and feature signatures are supplied by the environment; the
// audit never computes chemistry.
struct Molecule {
  std::string id;
  std::map<std::string, double> properties;
  std::set<int> features;
};

struct CandidatePool {
  std::string id;
  std::vector<Molecule> molecules;
  int created_at_iteration = 0;
};

struct Observation {
  std::string label;
  double value = 0.0;
};

struct ResidualEntry {
  std::string label;
  double value = 0.0;
};
using ResidualVector = std::vector<ResidualEntry>;

struct AuditReport {
  std::vector<Observation> observations;
  ResidualVector residuals;
  bool passed = false;
  std::vector<std::string> failed_labels;
};

// Token grammar shared by the JSON config, the rendered channels and the CLI.
std::string to_token(MetricField field);
std::string to_token(AggregationKind agg);
std::string to_token(Comparison cmp);
MetricField field_from_token(const std::string& token, std::string* custom_name);
AggregationKind aggregation_from_token(const std::string& token);
Comparison comparison_from_token(const std::string& token);

// Name of the per-molecule property backing a requirement. Empty for
// PoolSize and Diversity, which are pool-intrinsic.
std::string property_name(const Requirement& req);

bool comparison_holds(Comparison cmp, double observation, double threshold);

// True for requirements evaluated molecule by molecule (worst-case
// aggregations plus per-molecule novelty).
bool is_per_molecule(const Requirement& req);

double jaccard(const std::set<int>& a, const std::set<int>& b);

// 1 - mean pairwise Jaccard over feature signatures. Needs >= 2 molecules;
// the gate maps smaller pools to 0.0 instead (see aggregate).
double diversity(const CandidatePool& pool);

// 1 - max Jaccard against the reference library.
double novelty(const Molecule& mol, const std::vector<Molecule>& reference);

Observation aggregate(const CandidatePool& pool, const Requirement& req);
double residual(const Observation& obs, const Requirement& req);
ResidualVector residual_vector(const CandidatePool& pool, const RequirementSet& reqs);
AuditReport gate(const CandidatePool& pool, const RequirementSet& reqs);

// Throws ConfigError on empty sets, duplicate labels, non-finite thresholds
// or a field/aggregation pairing outside the allowed table.
void validate(const RequirementSet& reqs);

RequirementSet load_requirements(const std::string& json_text);
RequirementSet load_requirements_file(const std::string& path);

// Shortest round-trip formatting (for thresholds that must parse back
// exactly) and fixed-precision formatting (for display lines).
std::string fmt_shortest(double value);
std::string fmt_fixed(double value, int precision);

}  // namespace cacm
