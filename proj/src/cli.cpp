#include "cacm/cli.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace cacm {

CliConfig default_cli_config() {
  CliConfig config;
  for (uint64_t s = 1; s <= 30; ++s) config.seeds.push_back(s);
  config.modes = {Mode::Cacm, Mode::RawBaseline, Mode::RepairSignalOnly,
                  Mode::NoCorrectiveSelection, Mode::NoDynamicCompression};
  return config;
}

CliConfig load_cli_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  CliConfig config = default_cli_config();
  if (doc.contains("seeds")) {
    config.seeds = doc["seeds"].get<std::vector<uint64_t>>();
  }
  if (doc.contains("difficulty")) {
    config.difficulty = difficulty_from_token(doc["difficulty"].get<std::string>());
  }
  if (doc.contains("modes")) {
    config.modes.clear();
    for (const auto& token : doc["modes"]) {
      config.modes.push_back(mode_from_token(token.get<std::string>()));
    }
  }
  if (doc.contains("budgets")) {
    const auto list = doc["budgets"].get<std::vector<int>>();
    if (list.size() != 6) throw ConfigError("budgets must hold 6 values: Kd,Wd,Kc,Bs,Bd,Bc");
    config.budgets = Budgets{list[0], list[1], list[2], list[3], list[4], list[5]};
  }
  if (doc.contains("out")) config.out_dir = doc["out"].get<std::string>();
  if (doc.contains("jobs")) config.jobs = doc["jobs"].get<int>();
  if (config.seeds.empty()) throw ConfigError("config needs at least one seed");
  if (config.modes.empty()) throw ConfigError("config needs at least one mode");
  return config;
}

std::vector<SweepEpisode> run_sweep(const std::vector<Mode>& modes,
                                    const std::vector<uint64_t>& seeds, Difficulty difficulty,
                                    const Budgets& budgets, bool full_horizon, int jobs) {
  std::vector<SweepEpisode> episodes;
  for (Mode mode : modes) {
    for (uint64_t seed : seeds) {
      episodes.push_back(SweepEpisode{mode, seed, {}});
    }
  }
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(episodes.size())));
  std::atomic<size_t> next{0};
  auto work = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= episodes.size()) return;
      episodes[i].result = run_synthetic_episode(episodes[i].seed, difficulty, episodes[i].mode,
                                                 budgets, full_horizon);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  return episodes;
}

namespace {

std::string trajectory_path(const std::string& out_dir, const std::string& prefix, Mode mode,
                            uint64_t seed) {
  return out_dir + "/trajectories/" + prefix + to_token(mode) + "_seed" + std::to_string(seed) +
         ".jsonl";
}

std::string run_summary(const SyntheticTarget& target, Mode mode, uint64_t seed,
                        const EpisodeResult& result) {
  std::string out;
  out += "target: " + target.target_id + "\n";
  out += "mode: " + to_token(mode) + "\n";
  out += "seed: " + std::to_string(seed) + "\n";
  out += std::string("success: ") + (result.success ? "true" : "false") + "\n";
  out += "iterations_used: " + std::to_string(result.iterations_used) + "\n";
  if (result.aborted) out += "aborted: " + result.abort_reason + "\n";
  if (!result.returned_pool.molecules.empty()) {
    const PoolSummary s = make_pool_summary(result.returned_pool, target.requirements,
                                            result.returned_pool.created_at_iteration);
    out += "returned_pool: " + s.pool_id + " size=" + std::to_string(s.size) +
           " diversity=" + fmt_fixed(s.diversity, 4) + " worst_docking=" +
           fmt_fixed(s.worst_docking, 4) + " min_novelty=" + fmt_fixed(s.min_novelty, 4) +
           " min_qed=" + fmt_fixed(s.min_qed, 4) + " max_sas=" + fmt_fixed(s.max_sas, 4) +
           " min_lipinski=" + fmt_fixed(s.min_lipinski, 4) +
           " quality=" + fmt_fixed(s.quality_score, 4) + "\n";
  }
  out += "state_chars_per_iteration:";
  for (const IterationRecord& rec : result.trajectory) {
    out += " " + std::to_string(rec.state_chars);
  }
  out += "\n";
  return out;
}

}  // namespace

int cmd_run(uint64_t seed, Mode mode, Difficulty difficulty, const Budgets& budgets,
            const std::string& out_dir) {
  try {
    const SyntheticTarget target = make_target(seed, difficulty);
    const EpisodeResult result = run_synthetic_episode(seed, difficulty, mode, budgets);

    const std::string stem = out_dir + "/run_" + to_token(mode) + "_" + to_token(difficulty) +
                             "_seed" + std::to_string(seed);
    write_text_file(stem + ".trajectory.jsonl", serialize_trajectory(result.trajectory));
    const std::string summary = run_summary(target, mode, seed, result);
    write_text_file(stem + ".summary.txt", summary);
    std::cout << summary;

    if (result.aborted) return kExitExecutionError;
    return result.success ? kExitSuccess : kExitProtocolFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitExecutionError;
  }
}

int cmd_bench(const CliConfig& config) {
  try {
    const RequirementSet reqs = make_target(1, config.difficulty).requirements;
    const std::vector<SweepEpisode> episodes =
        run_sweep(config.modes, config.seeds, config.difficulty, config.budgets, false,
                  config.jobs);

    for (const SweepEpisode& ep : episodes) {
      write_text_file(trajectory_path(config.out_dir, "", ep.mode, ep.seed),
                      serialize_trajectory(ep.result.trajectory));
    }

    // Tables come from the logs, not the in-memory results.
    std::vector<SeedOutcome> outcomes;
    std::vector<ModeSummary> summaries;
    std::vector<CutoffRow> cutoff_rows;
    for (Mode mode : config.modes) {
      std::vector<std::vector<IterationRecord>> mode_records;
      for (uint64_t seed : config.seeds) {
        const auto records =
            read_trajectory_file(trajectory_path(config.out_dir, "", mode, seed));
        outcomes.push_back(summarize_episode(mode, seed, records, reqs));
        mode_records.push_back(records);
      }
      summaries.push_back(summarize_mode(mode, outcomes));
      for (int cutoff : {2, 4, 6, 8, 10}) {
        cutoff_rows.push_back(cutoff_stats(mode, cutoff, mode_records, reqs));
      }
    }

    const std::string summary_text =
        render_bench_summary_text(summaries) + "\n" + render_cutoff_text(cutoff_rows);
    write_text_file(config.out_dir + "/bench_summary.txt", summary_text);
    write_text_file(config.out_dir + "/bench_results.csv", render_bench_results_csv(outcomes));
    write_text_file(config.out_dir + "/bench_cutoff.csv", render_cutoff_csv(cutoff_rows));
    std::cout << summary_text;
    return kExitSuccess;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitExecutionError;
  }
}

int cmd_sensitivity(const CliConfig& config) {
  try {
    const RequirementSet reqs = make_target(1, config.difficulty).requirements;
    std::vector<SensitivityRow> rows;
    for (const SensitivitySetting& setting : sensitivity_settings()) {
      const std::vector<SweepEpisode> episodes = run_sweep(
          {Mode::Cacm}, config.seeds, config.difficulty, setting.budgets, false, config.jobs);
      for (const SweepEpisode& ep : episodes) {
        write_text_file(
            trajectory_path(config.out_dir, "sensitivity_" + setting.name + "_", ep.mode, ep.seed),
            serialize_trajectory(ep.result.trajectory));
      }

      SensitivityRow row;
      row.setting = setting.name;
      double size_sum = 0.0, iter_sum = 0.0, chars_sum = 0.0;
      double s_sum = 0.0, d_sum = 0.0, c_sum = 0.0;
      size_t record_count = 0;
      for (uint64_t seed : config.seeds) {
        const auto records = read_trajectory_file(trajectory_path(
            config.out_dir, "sensitivity_" + setting.name + "_", Mode::Cacm, seed));
        const SeedOutcome outcome = summarize_episode(Mode::Cacm, seed, records, reqs);
        ++row.total;
        if (outcome.success) ++row.successes;
        size_sum += outcome.pool_size;
        iter_sum += outcome.iterations;
        chars_sum += outcome.state_chars_mean;
        for (const IterationRecord& rec : records) {
          s_sum += rec.static_chars;
          d_sum += rec.dynamic_chars;
          c_sum += rec.corrective_chars;
          ++record_count;
        }
      }
      row.avg_pool_size = size_sum / row.total;
      row.avg_term_iters = iter_sum / row.total;
      row.avg_state_chars = chars_sum / row.total;
      if (record_count > 0) {
        row.static_chars_mean = s_sum / record_count;
        row.dynamic_chars_mean = d_sum / record_count;
        row.corrective_chars_mean = c_sum / record_count;
      }
      rows.push_back(std::move(row));
    }

    const std::string text = render_sensitivity_text(rows);
    write_text_file(config.out_dir + "/sensitivity.txt", text);
    write_text_file(config.out_dir + "/sensitivity.csv", render_sensitivity_csv(rows));
    std::cout << text;
    return kExitSuccess;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitExecutionError;
  }
}

int cmd_memcurve(const CliConfig& config) {
  try {
    // Full-horizon episodes: the curve needs active episodes at every
    // iteration, so first-success stopping is disabled here.
    std::vector<std::vector<IterationRecord>> cacm_records, raw_records;
    for (Mode mode : {Mode::Cacm, Mode::RawBaseline}) {
      const std::vector<SweepEpisode> episodes =
          run_sweep({mode}, config.seeds, config.difficulty, config.budgets, true, config.jobs);
      for (const SweepEpisode& ep : episodes) {
        write_text_file(trajectory_path(config.out_dir, "memcurve_", ep.mode, ep.seed),
                        serialize_trajectory(ep.result.trajectory));
      }
      for (uint64_t seed : config.seeds) {
        auto records =
            read_trajectory_file(trajectory_path(config.out_dir, "memcurve_", mode, seed));
        (mode == Mode::Cacm ? cacm_records : raw_records).push_back(std::move(records));
      }
    }

    const MemcurveTable table = build_memcurve(cacm_records, raw_records);
    const std::string text = render_memcurve_text(table);
    write_text_file(config.out_dir + "/memcurve.txt", text);
    write_text_file(config.out_dir + "/memcurve.csv", render_memcurve_csv(table));
    std::cout << text;
    return kExitSuccess;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitExecutionError;
  }
}

}  // namespace cacm
