#include <cmath>

#include "cacm/diagnosis.hpp"
#include "cacm/rng.hpp"
#include "doctest.h"
#include "support/kit_fixture.hpp"
#include "support/random_instances.hpp"

using namespace cacm;

namespace {

RequirementSet small_reqs() {
  RequirementSet reqs;
  reqs.target_id = "t";
  Requirement vina;
  vina.field = MetricField::Docking;
  vina.aggregation = AggregationKind::WorstCaseMax;
  vina.comparison = Comparison::Lt;
  vina.threshold = -7.77;
  vina.label = "vina";
  Requirement qed;
  qed.field = MetricField::Qed;
  qed.aggregation = AggregationKind::WorstCaseMin;
  qed.comparison = Comparison::Gt;
  qed.threshold = 0.43;
  qed.label = "qed";
  reqs.requirements = {vina, qed};
  return reqs;
}

}  // namespace

TEST_CASE("severity: no violations, a single violation, additivity") {
  const RequirementSet reqs = small_reqs();

  CHECK(severity({{"vina", 0.5}, {"qed", 0.1}}, reqs) == 0.0);

  const double single = severity({{"vina", -0.412}, {"qed", 0.1}}, reqs);
  CHECK(single == doctest::Approx(0.412 / 7.77).epsilon(1e-9));
  CHECK(single == doctest::Approx(0.05302).epsilon(1e-3));

  const double other = severity({{"vina", 0.5}, {"qed", -0.05}}, reqs);
  const double both = severity({{"vina", -0.412}, {"qed", -0.05}}, reqs);
  CHECK(both == doctest::Approx(single + other).epsilon(1e-12));

  CHECK_THROWS_AS(severity({{"vina", 0.0}}, reqs), DiagnosisError);
}

TEST_CASE("severity: worsening a violated residual strictly increases it") {
  const RequirementSet reqs = small_reqs();
  double previous = severity({{"vina", -0.1}, {"qed", -0.05}}, reqs);
  for (double gap = 0.2; gap < 2.0; gap += 0.1) {
    const double current = severity({{"vina", -gap}, {"qed", -0.05}}, reqs);
    CHECK(current > previous);
    previous = current;
  }
}

TEST_CASE("classify_family: dominance, single family, exact ties") {
  const RequirementSet kit = kitfx::load_kit_requirements();

  SUBCASE("docking-dominant violation set is a binding bottleneck") {
    // vina, novelty, qed and lipinski violated; vina carries most severity.
    ResidualVector rv = {{"size", 95.0}, {"vina", -0.412},   {"novelty", -0.015},
                         {"diversity", 0.1}, {"qed", -0.005}, {"sas", 0.07},
                         {"lipinski", -0.04}};
    CHECK(classify_family(rv, kit) == FailureFamily::BindingBottleneck);
  }

  SUBCASE("a lone size violation is a size deficit") {
    ResidualVector rv = {{"size", -3.0}, {"vina", 0.4},  {"novelty", 0.1},
                         {"diversity", 0.1}, {"qed", 0.2}, {"sas", 0.3},
                         {"lipinski", 0.4}};
    CHECK(classify_family(rv, kit) == FailureFamily::SizeDeficit);
  }

  SUBCASE("no dominant family yields mixed") {
    // size 3/5 = 0.6, vina 0.9/7.77 ~ 0.116, novelty 0.4: three families,
    // largest share 0.6/1.116 < 0.5... use sums that split below half.
    ResidualVector rv = {{"size", -1.0}, {"vina", -3.0},  {"novelty", -0.35},
                         {"diversity", 0.1}, {"qed", 0.2}, {"sas", 0.3},
                         {"lipinski", 0.4}};
    // size 0.2, vina 0.386, novelty 0.35: max share 0.386/0.936 < 0.5.
    CHECK(classify_family(rv, kit) == FailureFamily::Mixed);
  }

  SUBCASE("an exact two-family tie keeps the earlier enumeration entry") {
    RequirementSet reqs;
    reqs.target_id = "tie";
    Requirement size;
    size.field = MetricField::PoolSize;
    size.aggregation = AggregationKind::Cardinality;
    size.comparison = Comparison::Ge;
    size.threshold = 4.0;
    size.label = "size";
    Requirement vina;
    vina.field = MetricField::Docking;
    vina.aggregation = AggregationKind::WorstCaseMax;
    vina.comparison = Comparison::Lt;
    vina.threshold = -2.0;
    vina.label = "vina";
    reqs.requirements = {size, vina};
    // |−1|/4 = 0.25 each: SizeDeficit precedes BindingBottleneck.
    ResidualVector rv = {{"size", -1.0}, {"vina", -0.5}};
    CHECK(classify_family(rv, reqs) == FailureFamily::SizeDeficit);
  }

  SUBCASE("no violation is an error") {
    ResidualVector rv = {{"size", 1.0}, {"vina", 0.4},  {"novelty", 0.1},
                         {"diversity", 0.1}, {"qed", 0.2}, {"sas", 0.3},
                         {"lipinski", 0.4}};
    CHECK_THROWS_AS(classify_family(rv, kit), DiagnosisError);
  }
}

TEST_CASE("diagnose: KIT fixture recommends a code-screen repair") {
  const RequirementSet reqs = kitfx::load_kit_requirements();
  const CandidatePool pool = kitfx::kit_audit_pool();
  const AuditReport report = gate(pool, reqs);
  REQUIRE_FALSE(report.passed);

  CHECK(compliant_count(pool, reqs) == 24);
  CHECK(required_pool_size(reqs) == 5);

  const CorrectiveRecord rec = diagnose(reqs, pool, report, 2);
  CHECK(rec.iteration == 2);
  CHECK(rec.family == FailureFamily::BindingBottleneck);
  CHECK(rec.bias == ActionBias::CodeScreen);
  CHECK(rec.severity > 0.0);
  CHECK(rec.failed_labels == report.failed_labels);
  CHECK(rec.repair_hint.find("24/100") != std::string::npos);
  CHECK(rec.repair_hint.find("diverse subset") != std::string::npos);
  CHECK(rec.repair_hint.find("at least 5") != std::string::npos);
  CHECK(rec.rationale.find("dominant=docking") != std::string::npos);
}

TEST_CASE("diagnose: size-only and developability-only failures") {
  const RequirementSet reqs = kitfx::load_kit_requirements();

  SUBCASE("two molecules failing only pool size") {
    CandidatePool pool;
    pool.id = "tiny";
    pool.molecules.push_back(kitfx::kit_molecule(0, -8.5, 0.6, 2.0, 3.5, 8));
    pool.molecules.push_back(kitfx::kit_molecule(1, -8.6, 0.6, 2.0, 3.5, 8));
    const AuditReport report = gate(pool, reqs);
    REQUIRE_FALSE(report.passed);
    const CorrectiveRecord rec = diagnose(reqs, pool, report, 1);
    CHECK(rec.family == FailureFamily::SizeDeficit);
    CHECK(rec.bias == ActionBias::Generate);
  }

  SUBCASE("a qed-only violation optimizes") {
    CandidatePool pool = kitfx::kit_audit_pool();
    // Push every molecule into compliance except one deep qed miss.
    for (Molecule& mol : pool.molecules) {
      mol.properties["docking"] = -8.5;
      mol.properties["lipinski"] = 3.5;
      mol.properties["novelty"] = 0.95;
      mol.properties["qed"] = 0.6;
    }
    pool.molecules[5].properties["qed"] = 0.05;
    const AuditReport report = gate(pool, reqs);
    REQUIRE(report.failed_labels == std::vector<std::string>{"qed"});
    const CorrectiveRecord rec = diagnose(reqs, pool, report, 4);
    CHECK(rec.family == FailureFamily::DevelopabilityViolation);
    CHECK(rec.bias == ActionBias::Optimize);
  }
}

TEST_CASE("diagnose: refuses a passing report and stays deterministic") {
  const RequirementSet reqs = kitfx::load_kit_requirements();
  const CandidatePool pool = kitfx::kit_audit_pool();
  AuditReport passing = gate(pool, reqs);
  passing.passed = true;
  CHECK_THROWS_AS(diagnose(reqs, pool, passing, 1), DiagnosisError);

  const AuditReport report = gate(pool, reqs);
  const CorrectiveRecord a = diagnose(reqs, pool, report, 2);
  const CorrectiveRecord b = diagnose(reqs, pool, report, 2);
  CHECK(a.family == b.family);
  CHECK(a.severity == b.severity);
  CHECK(a.repair_hint == b.repair_hint);
  CHECK(a.rationale == b.rationale);
  CHECK(a.bias == b.bias);
}

TEST_CASE("diagnose: family soundness and bias totality on random failures") {
  Rng rng(31);
  int diagnosed = 0;
  while (diagnosed < 300) {
    const auto [pool, reqs] = testgen::random_instance(rng);
    const AuditReport report = gate(pool, reqs);
    if (report.passed) continue;
    ++diagnosed;
    const CorrectiveRecord rec = diagnose(reqs, pool, report, 1);
    CHECK(rec.severity > 0.0);
    REQUIRE_FALSE(rec.failed_labels.empty());

    // The returned family's anchor label must be among the failures.
    auto failed_field = [&](MetricField field) {
      for (const Requirement& req : reqs.requirements) {
        if (req.field != field) continue;
        for (const std::string& label : rec.failed_labels) {
          if (label == req.label) return true;
        }
      }
      return false;
    };
    switch (rec.family) {
      case FailureFamily::SizeDeficit: CHECK(failed_field(MetricField::PoolSize)); break;
      case FailureFamily::DiversityCollapse: CHECK(failed_field(MetricField::Diversity)); break;
      case FailureFamily::BindingBottleneck: CHECK(failed_field(MetricField::Docking)); break;
      case FailureFamily::NoveltyDeficit: CHECK(failed_field(MetricField::Novelty)); break;
      case FailureFamily::DevelopabilityViolation:
        CHECK((failed_field(MetricField::Qed) || failed_field(MetricField::Sas) ||
               failed_field(MetricField::Lipinski) || failed_field(MetricField::Custom)));
        break;
      case FailureFamily::Mixed: break;
    }

    // Exactly one bias per family under the fixed rules.
    switch (rec.family) {
      case FailureFamily::SizeDeficit:
      case FailureFamily::NoveltyDeficit:
      case FailureFamily::DiversityCollapse:
        CHECK(rec.bias == ActionBias::Generate);
        break;
      case FailureFamily::BindingBottleneck:
        CHECK(rec.bias == (compliant_count(pool, reqs) >= required_pool_size(reqs)
                               ? ActionBias::CodeScreen
                               : ActionBias::Optimize));
        break;
      case FailureFamily::DevelopabilityViolation:
      case FailureFamily::Mixed:
        CHECK(rec.bias == ActionBias::Optimize);
        break;
    }
  }
}
