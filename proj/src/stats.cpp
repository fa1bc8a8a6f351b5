#include "cacm/stats.hpp"

#include <algorithm>
#include <cmath>

#include "cacm/memory.hpp"

namespace cacm {

std::vector<SensitivitySetting> sensitivity_settings() {
  std::vector<SensitivitySetting> settings;
  settings.push_back({"default", Budgets{4, 3, 3, 1400, 1800, 1200}});
  settings.push_back({"tight_chars", Budgets{4, 3, 3, 900, 1200, 700}});
  settings.push_back({"compact_counts", Budgets{2, 2, 2, 1400, 1800, 1200}});
  settings.push_back({"wide_counts", Budgets{6, 5, 5, 1400, 1800, 1200}});
  settings.push_back({"rebalanced_chars", Budgets{4, 3, 3, 1000, 2200, 1000}});
  return settings;
}

int record_pool_size(const IterationRecord& record, const RequirementSet& reqs) {
  const std::vector<Observation> obs = observations_from(record, reqs);
  for (size_t i = 0; i < reqs.requirements.size(); ++i) {
    if (reqs.requirements[i].field == MetricField::PoolSize) {
      return static_cast<int>(std::llround(obs[i].value));
    }
  }
  return 0;
}

double record_quality(const IterationRecord& record, const RequirementSet& reqs) {
  return quality_score(observations_from(record, reqs), reqs);
}

namespace {

// The record whose pool the episode would return under a cap: the first
// passing record, otherwise the best by quality (later record wins ties).
const IterationRecord* returned_record(const std::vector<IterationRecord>& records, size_t limit,
                                       const RequirementSet& reqs) {
  const size_t n = std::min(limit, records.size());
  for (size_t i = 0; i < n; ++i) {
    if (records[i].passed) return &records[i];
  }
  const IterationRecord* best = nullptr;
  double best_quality = -1.0;
  for (size_t i = 0; i < n; ++i) {
    const double q = record_quality(records[i], reqs);
    if (!best || q >= best_quality) {
      best = &records[i];
      best_quality = q;
    }
  }
  return best;
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

SeedOutcome summarize_episode(Mode mode, uint64_t seed,
                              const std::vector<IterationRecord>& records,
                              const RequirementSet& reqs) {
  SeedOutcome out;
  out.mode = mode;
  out.seed = seed;
  out.iterations = static_cast<int>(records.size());
  std::vector<double> chars;
  for (const IterationRecord& rec : records) {
    out.success = out.success || rec.passed;
    chars.push_back(rec.state_chars);
  }
  out.state_chars_mean = mean(chars);
  if (const IterationRecord* ret = returned_record(records, records.size(), reqs)) {
    out.pool_size = record_pool_size(*ret, reqs);
  }
  return out;
}

ModeSummary summarize_mode(Mode mode, const std::vector<SeedOutcome>& outcomes) {
  ModeSummary s;
  s.mode = mode;
  std::vector<double> sizes, iters, chars;
  for (const SeedOutcome& o : outcomes) {
    if (o.mode != mode) continue;
    ++s.total;
    if (o.success) ++s.successes;
    sizes.push_back(o.pool_size);
    iters.push_back(o.iterations);
    chars.push_back(o.state_chars_mean);
  }
  s.avg_pool_size = mean(sizes);
  s.avg_iterations = mean(iters);
  s.avg_state_chars = mean(chars);
  return s;
}

CutoffRow cutoff_stats(Mode mode, int cutoff,
                       const std::vector<std::vector<IterationRecord>>& episodes,
                       const RequirementSet& reqs) {
  CutoffRow row;
  row.mode = mode;
  row.cutoff = cutoff;
  std::vector<double> sizes;
  for (const std::vector<IterationRecord>& records : episodes) {
    ++row.total;
    const size_t limit = static_cast<size_t>(cutoff);
    bool success = false;
    for (size_t i = 0; i < std::min(limit, records.size()); ++i) {
      success = success || records[i].passed;
    }
    if (success) ++row.successes;
    if (const IterationRecord* ret = returned_record(records, limit, reqs)) {
      sizes.push_back(record_pool_size(*ret, reqs));
    }
  }
  row.avg_pool_size = mean(sizes);
  return row;
}

MemcurveTable build_memcurve(const std::vector<std::vector<IterationRecord>>& cacm_episodes,
                             const std::vector<std::vector<IterationRecord>>& raw_episodes) {
  MemcurveTable table;
  size_t max_len = 0;
  for (const auto& ep : cacm_episodes) max_len = std::max(max_len, ep.size());
  for (const auto& ep : raw_episodes) max_len = std::max(max_len, ep.size());

  auto column_mean = [](const std::vector<std::vector<IterationRecord>>& episodes, size_t i) {
    std::vector<double> values;
    for (const auto& ep : episodes) {
      if (i < ep.size()) values.push_back(ep[i].state_chars);
    }
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  };

  for (size_t i = 0; i < max_len; ++i) {
    table.iterations.push_back(static_cast<int>(i + 1));
    table.cacm_mean_chars.push_back(column_mean(cacm_episodes, i));
    table.raw_mean_chars.push_back(column_mean(raw_episodes, i));
  }
  return table;
}

std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> widths(header.size(), 0);
  for (size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size() && c < widths.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  auto emit_row = [&widths](const std::vector<std::string>& row) {
    std::string line;
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      line += row[c];
      line.append(widths[c] - row[c].size(), ' ');
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    return line + "\n";
  };
  std::string out = emit_row(header);
  std::string rule;
  for (size_t c = 0; c < widths.size(); ++c) {
    if (c) rule += "  ";
    rule.append(widths[c], '-');
  }
  out += rule + "\n";
  for (const auto& row : rows) out += emit_row(row);
  return out;
}

namespace {

std::string pct(int successes, int total) {
  if (total == 0) return "0.0";
  return fmt_fixed(100.0 * successes / total, 1);
}

}  // namespace

std::string render_bench_summary_text(const std::vector<ModeSummary>& summaries) {
  std::vector<std::vector<std::string>> rows;
  for (const ModeSummary& s : summaries) {
    rows.push_back({to_token(s.mode), pct(s.successes, s.total) + " / " + std::to_string(s.successes),
                    fmt_fixed(s.avg_pool_size, 2), fmt_fixed(s.avg_iterations, 2),
                    fmt_fixed(s.avg_state_chars, 1)});
  }
  return render_table({"mode", "tsr (% / #)", "avg_pool_size", "avg_term_iters", "avg_state_chars"},
                      rows);
}

std::string render_bench_results_csv(const std::vector<SeedOutcome>& outcomes) {
  std::string out = "mode,seed,success,iterations,pool_size,state_chars_mean\n";
  for (const SeedOutcome& o : outcomes) {
    out += to_token(o.mode) + "," + std::to_string(o.seed) + "," + (o.success ? "1" : "0") + "," +
           std::to_string(o.iterations) + "," + std::to_string(o.pool_size) + "," +
           fmt_fixed(o.state_chars_mean, 1) + "\n";
  }
  return out;
}

std::string render_cutoff_text(const std::vector<CutoffRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const CutoffRow& row : rows) {
    cells.push_back({to_token(row.mode), std::to_string(row.cutoff),
                     std::to_string(row.successes) + "/" + std::to_string(row.total),
                     pct(row.successes, row.total), fmt_fixed(row.avg_pool_size, 2)});
  }
  return render_table({"mode", "cutoff", "tsr (#)", "tsr (%)", "avg_pool_size"}, cells);
}

std::string render_cutoff_csv(const std::vector<CutoffRow>& rows) {
  std::string out = "mode,cutoff,successes,total,success_rate,avg_pool_size\n";
  for (const CutoffRow& row : rows) {
    out += to_token(row.mode) + "," + std::to_string(row.cutoff) + "," +
           std::to_string(row.successes) + "," + std::to_string(row.total) + "," +
           pct(row.successes, row.total) + "," + fmt_fixed(row.avg_pool_size, 2) + "\n";
  }
  return out;
}

std::string render_sensitivity_text(const std::vector<SensitivityRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const SensitivityRow& row : rows) {
    cells.push_back({row.setting, pct(row.successes, row.total) + " / " + std::to_string(row.successes),
                     fmt_fixed(row.avg_pool_size, 2), fmt_fixed(row.avg_term_iters, 2),
                     fmt_fixed(row.avg_state_chars, 1)});
  }
  std::string out = render_table(
      {"setting", "tsr (% / #)", "avg_pool_size", "avg_term_iters", "avg_state_chars"}, cells);
  out += "\n";
  cells.clear();
  for (const SensitivityRow& row : rows) {
    cells.push_back({row.setting, fmt_fixed(row.static_chars_mean, 1),
                     fmt_fixed(row.dynamic_chars_mean, 1),
                     fmt_fixed(row.corrective_chars_mean, 1)});
  }
  out += render_table({"setting", "static", "dynamic", "corrective"}, cells);
  return out;
}

std::string render_sensitivity_csv(const std::vector<SensitivityRow>& rows) {
  std::string out =
      "setting,successes,total,avg_pool_size,avg_term_iters,avg_state_chars,"
      "static_chars,dynamic_chars,corrective_chars\n";
  for (const SensitivityRow& row : rows) {
    out += row.setting + "," + std::to_string(row.successes) + "," + std::to_string(row.total) +
           "," + fmt_fixed(row.avg_pool_size, 2) + "," + fmt_fixed(row.avg_term_iters, 2) + "," +
           fmt_fixed(row.avg_state_chars, 1) + "," + fmt_fixed(row.static_chars_mean, 1) + "," +
           fmt_fixed(row.dynamic_chars_mean, 1) + "," + fmt_fixed(row.corrective_chars_mean, 1) +
           "\n";
  }
  return out;
}

std::string render_memcurve_text(const MemcurveTable& table) {
  std::vector<std::vector<std::string>> cells;
  for (size_t i = 0; i < table.iterations.size(); ++i) {
    cells.push_back({std::to_string(table.iterations[i]),
                     fmt_fixed(table.cacm_mean_chars[i], 1),
                     fmt_fixed(table.raw_mean_chars[i], 1)});
  }
  return render_table({"iteration", "cacm_state_chars", "raw_state_chars"}, cells);
}

std::string render_memcurve_csv(const MemcurveTable& table) {
  std::string out = "iteration,cacm_state_chars,raw_state_chars\n";
  for (size_t i = 0; i < table.iterations.size(); ++i) {
    out += std::to_string(table.iterations[i]) + "," + fmt_fixed(table.cacm_mean_chars[i], 1) +
           "," + fmt_fixed(table.raw_mean_chars[i], 1) + "\n";
  }
  return out;
}

}  // namespace cacm
