#include "cacm/protocol.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cacm {

std::string to_token(MetricField field) {
  switch (field) {
    case MetricField::PoolSize: return "pool_size";
    case MetricField::Diversity: return "diversity";
    case MetricField::Novelty: return "novelty";
    case MetricField::Qed: return "qed";
    case MetricField::Sas: return "sas";
    case MetricField::Lipinski: return "lipinski";
    case MetricField::Docking: return "docking";
    case MetricField::Custom: return "custom";
  }
  return "custom";
}

std::string to_token(AggregationKind agg) {
  switch (agg) {
    case AggregationKind::Cardinality: return "cardinality";
    case AggregationKind::SetFunctional: return "set_functional";
    case AggregationKind::WorstCaseMin: return "worst_min";
    case AggregationKind::WorstCaseMax: return "worst_max";
  }
  return "worst_min";
}

std::string to_token(Comparison cmp) {
  switch (cmp) {
    case Comparison::Ge: return "ge";
    case Comparison::Gt: return "gt";
    case Comparison::Le: return "le";
    case Comparison::Lt: return "lt";
  }
  return "ge";
}

MetricField field_from_token(const std::string& token, std::string* custom_name) {
  if (custom_name) custom_name->clear();
  if (token == "pool_size") return MetricField::PoolSize;
  if (token == "diversity") return MetricField::Diversity;
  if (token == "novelty") return MetricField::Novelty;
  if (token == "qed") return MetricField::Qed;
  if (token == "sas") return MetricField::Sas;
  if (token == "lipinski") return MetricField::Lipinski;
  if (token == "docking") return MetricField::Docking;
  if (token.rfind("custom:", 0) == 0 && token.size() > 7) {
    if (custom_name) *custom_name = token.substr(7);
    return MetricField::Custom;
  }
  throw ConfigError("unknown field token: " + token);
}

AggregationKind aggregation_from_token(const std::string& token) {
  if (token == "cardinality") return AggregationKind::Cardinality;
  if (token == "set_functional") return AggregationKind::SetFunctional;
  if (token == "worst_min") return AggregationKind::WorstCaseMin;
  if (token == "worst_max") return AggregationKind::WorstCaseMax;
  throw ConfigError("unknown aggregation token: " + token);
}

Comparison comparison_from_token(const std::string& token) {
  if (token == "ge") return Comparison::Ge;
  if (token == "gt") return Comparison::Gt;
  if (token == "le") return Comparison::Le;
  if (token == "lt") return Comparison::Lt;
  throw ConfigError("unknown comparison token: " + token);
}

std::string property_name(const Requirement& req) {
  switch (req.field) {
    case MetricField::Qed: return "qed";
    case MetricField::Sas: return "sas";
    case MetricField::Lipinski: return "lipinski";
    case MetricField::Docking: return "docking";
    case MetricField::Novelty: return "novelty";
    case MetricField::Custom: return req.custom_name;
    default: return "";
  }
}

bool comparison_holds(Comparison cmp, double observation, double threshold) {
  switch (cmp) {
    case Comparison::Ge: return observation >= threshold;
    case Comparison::Gt: return observation > threshold;
    case Comparison::Le: return observation <= threshold;
    case Comparison::Lt: return observation < threshold;
  }
  return false;
}

bool is_per_molecule(const Requirement& req) {
  return req.aggregation == AggregationKind::WorstCaseMin ||
         req.aggregation == AggregationKind::WorstCaseMax ||
         req.field == MetricField::Novelty;
}

double jaccard(const std::set<int>& a, const std::set<int>& b) {
  if (a.empty() && b.empty()) return 1.0;
  size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  const size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double diversity(const CandidatePool& pool) {
  const size_t n = pool.molecules.size();
  if (n < 2) {
    throw AuditError("diversity undefined for pool '" + pool.id + "' with fewer than 2 molecules");
  }
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      sum += jaccard(pool.molecules[i].features, pool.molecules[j].features);
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return 1.0 - sum / pairs;
}

double novelty(const Molecule& mol, const std::vector<Molecule>& reference) {
  if (reference.empty()) throw AuditError("novelty needs a non-empty reference library");
  double max_sim = 0.0;
  for (const Molecule& ref : reference) {
    max_sim = std::max(max_sim, jaccard(mol.features, ref.features));
  }
  return 1.0 - max_sim;
}

namespace {

double molecule_property(const Molecule& mol, const std::string& name, const CandidatePool& pool) {
  auto it = mol.properties.find(name);
  if (it == mol.properties.end()) {
    throw AuditError("molecule '" + mol.id + "' in pool '" + pool.id +
                     "' is missing property '" + name + "'");
  }
  return it->second;
}

}  // namespace

Observation aggregate(const CandidatePool& pool, const Requirement& req) {
  Observation obs;
  obs.label = req.label;

  if (req.aggregation == AggregationKind::Cardinality) {
    obs.value = static_cast<double>(pool.molecules.size());
    return obs;
  }
  if (req.field == MetricField::Diversity) {
    // Pools with fewer than two molecules have no pairwise spread; the gate
    // stays total by observing 0.0 (fails any positive threshold).
    obs.value = pool.molecules.size() < 2 ? 0.0 : diversity(pool);
    return obs;
  }
  if (pool.molecules.empty()) {
    throw AuditError("empty pool '" + pool.id + "' cannot be aggregated for '" + req.label + "'");
  }

  const std::string prop = property_name(req);
  double value = molecule_property(pool.molecules.front(), prop, pool);
  const bool take_max = req.aggregation == AggregationKind::WorstCaseMax;
  for (size_t i = 1; i < pool.molecules.size(); ++i) {
    const double v = molecule_property(pool.molecules[i], prop, pool);
    value = take_max ? std::max(value, v) : std::min(value, v);
  }
  obs.value = value;
  return obs;
}

double residual(const Observation& obs, const Requirement& req) {
  if (req.comparison == Comparison::Ge || req.comparison == Comparison::Gt) {
    return obs.value - req.threshold;
  }
  return req.threshold - obs.value;
}

ResidualVector residual_vector(const CandidatePool& pool, const RequirementSet& reqs) {
  ResidualVector out;
  out.reserve(reqs.requirements.size());
  for (const Requirement& req : reqs.requirements) {
    out.push_back({req.label, residual(aggregate(pool, req), req)});
  }
  return out;
}

AuditReport gate(const CandidatePool& pool, const RequirementSet& reqs) {
  AuditReport report;
  report.observations.reserve(reqs.requirements.size());
  report.residuals.reserve(reqs.requirements.size());
  report.passed = true;
  for (const Requirement& req : reqs.requirements) {
    const Observation obs = aggregate(pool, req);
    report.observations.push_back(obs);
    report.residuals.push_back({req.label, residual(obs, req)});
    if (!comparison_holds(req.comparison, obs.value, req.threshold)) {
      report.passed = false;
      report.failed_labels.push_back(req.label);
    }
  }
  return report;
}

void validate(const RequirementSet& reqs) {
  if (reqs.requirements.empty()) throw ConfigError("requirement set is empty");
  std::set<std::string> labels;
  for (const Requirement& req : reqs.requirements) {
    if (req.label.empty()) throw ConfigError("requirement label is empty");
    if (!labels.insert(req.label).second) {
      throw ConfigError("duplicate requirement label: " + req.label);
    }
    if (!std::isfinite(req.threshold)) {
      throw ConfigError("non-finite threshold for requirement: " + req.label);
    }
    if (req.field == MetricField::Custom && req.custom_name.empty()) {
      throw ConfigError("custom field without a name for requirement: " + req.label);
    }

    bool ok = false;
    switch (req.field) {
      case MetricField::PoolSize:
        ok = req.aggregation == AggregationKind::Cardinality;
        break;
      case MetricField::Diversity:
      case MetricField::Novelty:
        ok = req.aggregation == AggregationKind::SetFunctional;
        break;
      case MetricField::Qed:
      case MetricField::Lipinski:
        ok = req.aggregation == AggregationKind::WorstCaseMin;
        break;
      case MetricField::Sas:
      case MetricField::Docking:
        ok = req.aggregation == AggregationKind::WorstCaseMax;
        break;
      case MetricField::Custom:
        ok = req.aggregation == AggregationKind::WorstCaseMin ||
             req.aggregation == AggregationKind::WorstCaseMax;
        break;
    }
    if (!ok) {
      throw ConfigError("requirement '" + req.label + "' pairs " + to_token(req.field) +
                        " with " + to_token(req.aggregation));
    }
    if (req.aggregation == AggregationKind::Cardinality && req.field != MetricField::PoolSize) {
      throw ConfigError("cardinality aggregation is reserved for pool_size");
    }
  }
}

RequirementSet load_requirements(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("requirement config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("requirements") || !doc["requirements"].is_array()) {
    throw ConfigError("requirement config must be an object with a 'requirements' array");
  }

  RequirementSet reqs;
  reqs.target_id = doc.value("target", std::string{});
  for (const auto& item : doc["requirements"]) {
    for (const char* key : {"label", "field", "agg", "cmp", "threshold"}) {
      if (!item.contains(key)) {
        throw ConfigError(std::string("requirement entry missing key '") + key + "'");
      }
    }
    Requirement req;
    req.label = item["label"].get<std::string>();
    req.field = field_from_token(item["field"].get<std::string>(), &req.custom_name);
    req.aggregation = aggregation_from_token(item["agg"].get<std::string>());
    req.comparison = comparison_from_token(item["cmp"].get<std::string>());
    if (!item["threshold"].is_number()) {
      throw ConfigError("threshold must be a number for requirement: " + req.label);
    }
    req.threshold = item["threshold"].get<double>();
    reqs.requirements.push_back(std::move(req));
  }
  validate(reqs);
  return reqs;
}

RequirementSet load_requirements_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open requirement config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_requirements(buf.str());
}

std::string fmt_shortest(double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string fmt_fixed(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
  return std::string(buf);
}

}  // namespace cacm
