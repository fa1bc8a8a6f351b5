#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cacm/stats.hpp"
#include "cacm/synthetic.hpp"

/*
 * Command entry points behind the cacm binary. Sweeps run episodes (up to
 * --jobs at a time), write one trajectory log per episode, then recompute
 * every table from the logs so that tables stay views over the records.
 * Reruns with identical flags overwrite outputs byte-identically.
 */

namespace cacm {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitExecutionError = 1;
inline constexpr int kExitProtocolFailure = 2;
inline constexpr int kExitUsage = 64;

struct CliConfig {
  std::vector<uint64_t> seeds;  // default 1..30
  Difficulty difficulty = Difficulty::Hard;
  std::vector<Mode> modes;      // default: all five
  Budgets budgets;
  std::string out_dir = "out";
  int jobs = 1;
};

CliConfig default_cli_config();

// JSON mirror of CliConfig; missing keys keep their defaults.
CliConfig load_cli_config(const std::string& path);

int cmd_run(uint64_t seed, Mode mode, Difficulty difficulty, const Budgets& budgets,
            const std::string& out_dir);
int cmd_bench(const CliConfig& config);
int cmd_sensitivity(const CliConfig& config);
int cmd_memcurve(const CliConfig& config);

// Seeds × modes sweep with per-episode logs; shared by bench and tests.
struct SweepEpisode {
  Mode mode = Mode::Cacm;
  uint64_t seed = 0;
  EpisodeResult result;
};

std::vector<SweepEpisode> run_sweep(const std::vector<Mode>& modes,
                                    const std::vector<uint64_t>& seeds, Difficulty difficulty,
                                    const Budgets& budgets, bool full_horizon, int jobs);

}  // namespace cacm
