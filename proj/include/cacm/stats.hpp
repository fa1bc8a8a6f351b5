#pragma once

#include <string>
#include <vector>

#include "cacm/trajectory.hpp"

/*
 * Views over trajectory logs: per-seed outcomes, per-mode summaries, cutoff
 * tables and the memory-growth curve. Every cell here is recomputed from
 * the log records plus the requirement set; nothing is carried over from
 * the live episodes.
 */

namespace cacm {

struct SeedOutcome {
  Mode mode = Mode::Cacm;
  uint64_t seed = 0;
  bool success = false;
  int iterations = 0;
  int pool_size = 0;
  double state_chars_mean = 0.0;
};

struct ModeSummary {
  Mode mode = Mode::Cacm;
  int successes = 0;
  int total = 0;
  double avg_pool_size = 0.0;
  double avg_iterations = 0.0;
  double avg_state_chars = 0.0;
};

struct CutoffRow {
  Mode mode = Mode::Cacm;
  int cutoff = 0;
  int successes = 0;
  int total = 0;
  double avg_pool_size = 0.0;
};

struct SensitivityRow {
  std::string setting;
  int successes = 0;
  int total = 0;
  double avg_pool_size = 0.0;
  double avg_term_iters = 0.0;
  double avg_state_chars = 0.0;
  double static_chars_mean = 0.0;
  double dynamic_chars_mean = 0.0;
  double corrective_chars_mean = 0.0;
};

struct SensitivitySetting {
  std::string name;
  Budgets budgets;
};

// The five budget settings of the sensitivity sweep, in emission order.
std::vector<SensitivitySetting> sensitivity_settings();

// Pool size and quality of the set a record's pool would return, recovered
// from residuals.
int record_pool_size(const IterationRecord& record, const RequirementSet& reqs);
double record_quality(const IterationRecord& record, const RequirementSet& reqs);

SeedOutcome summarize_episode(Mode mode, uint64_t seed,
                              const std::vector<IterationRecord>& records,
                              const RequirementSet& reqs);

ModeSummary summarize_mode(Mode mode, const std::vector<SeedOutcome>& outcomes);

// Returned-set statistics as if the episode had been capped at `cutoff`
// iterations: the passing pool when one exists in the prefix, otherwise the
// best prefix pool by quality.
CutoffRow cutoff_stats(Mode mode, int cutoff,
                       const std::vector<std::vector<IterationRecord>>& episodes,
                       const RequirementSet& reqs);

struct MemcurveTable {
  std::vector<int> iterations;
  std::vector<double> cacm_mean_chars;
  std::vector<double> raw_mean_chars;
};

MemcurveTable build_memcurve(const std::vector<std::vector<IterationRecord>>& cacm_episodes,
                             const std::vector<std::vector<IterationRecord>>& raw_episodes);

// Aligned text table; column widths fit the widest cell.
std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);

std::string render_bench_summary_text(const std::vector<ModeSummary>& summaries);
std::string render_bench_results_csv(const std::vector<SeedOutcome>& outcomes);
std::string render_cutoff_text(const std::vector<CutoffRow>& rows);
std::string render_cutoff_csv(const std::vector<CutoffRow>& rows);
std::string render_sensitivity_text(const std::vector<SensitivityRow>& rows);
std::string render_sensitivity_csv(const std::vector<SensitivityRow>& rows);
std::string render_memcurve_text(const MemcurveTable& table);
std::string render_memcurve_csv(const MemcurveTable& table);

}  // namespace cacm
