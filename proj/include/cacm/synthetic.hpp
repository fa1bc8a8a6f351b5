#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cacm/control.hpp"

/*
 * Seeded synthetic environment: targets with KIT-style requirement sets, a
 * property model in place of the molecular toolchain, three executors
 * (generate / optimize / screen) and a deterministic heuristic planner that
 * reads the rendered agent state. Everything is pure given (inputs, seed),
 * so distinct targets can run concurrently.
 */

namespace cacm {

enum class Difficulty { Easy, Medium, Hard };

std::string to_token(Difficulty difficulty);
Difficulty difficulty_from_token(const std::string& token);

struct SyntheticTarget {
  uint64_t seed = 1;
  Difficulty difficulty = Difficulty::Hard;
  std::string target_id;
  RequirementSet requirements;
  std::vector<Molecule> reference_library;
  PocketSummary pocket;
};

// Same seed yields an identical target in every field. Difficulty moves the
// thresholds relative to the fixed generator bands: easy thresholds sit
// outside the bands (a fresh batch passes), medium and hard sit where the
// worst case of a fresh batch always fails.
SyntheticTarget make_target(uint64_t seed, Difficulty difficulty);

// Fresh batch of n molecules. Property values are drawn from fixed bands; a
// deterministic slice of the batch (8 per 100) is drawn from a compliant
// band that individually clears every per-molecule threshold, so screening
// always has material to work with while the set-level worst case fails.
CandidatePool generate_pool(const SyntheticTarget& target, int n, const std::string& pool_id,
                            uint64_t seed);

// Improves the objective property per molecule with probability 0.8 and
// charges a small anti-correlated penalty to one other property. step_scale
// 0 is the identity path (no drift at all).
CandidatePool optimize_pool(const SyntheticTarget& target, const CandidatePool& source,
                            const std::string& objective_field, const std::string& pool_id,
                            uint64_t seed, double step_scale = 1.0);

// Union of the sources, per-molecule filter, then farthest-point greedy
// selection of a diverse subset (first pick: smallest id). Fewer than
// subset_size survivors are returned as-is.
CandidatePool screen_pool(const std::vector<const CandidatePool*>& sources,
                          const std::vector<Requirement>& filters, int subset_size,
                          const std::string& pool_id);

// Parses the planner-facing text: requirement lines, pool summaries and
// corrective entries. Follows the most recent corrective bias; with no
// corrective entry in sight it generates 100 fresh candidates.
Action heuristic_planner(const std::string& state_text, const PoolRegistry& registry,
                         uint64_t seed);

Planner make_planner();
Executor make_executor(const SyntheticTarget& target);
EpisodeContext make_context(const SyntheticTarget& target);

EpisodeResult run_synthetic_episode(uint64_t seed, Difficulty difficulty, Mode mode,
                                    const Budgets& budgets, bool full_horizon = false,
                                    const PlannerInputObserver& observer = nullptr);

}  // namespace cacm
