#include "cacm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>

#include "cacm/rng.hpp"

namespace cacm {

namespace {

// Tag universes. Bulk molecules overlap the reference library a little; the
// compliant slice does not overlap it at all, so its novelty is exactly 1.0.
constexpr int kBulkTagLo = 200, kBulkTagHi = 384;
constexpr int kIslandTagLo = 270, kIslandTagHi = 600;
constexpr int kRefTagLo = 120, kRefTagHi = 270;
constexpr int kBulkFeatureCount = 48;
constexpr int kIslandFeatureCount = 40;
constexpr int kReferenceCount = 6;

std::set<int> sample_tags(Rng& rng, int count, int lo, int hi) {
  std::set<int> tags;
  while (static_cast<int>(tags.size()) < count) {
    tags.insert(rng.uniform_int(lo, hi - 1));
  }
  return tags;
}

Requirement make_req(const std::string& label, MetricField field, AggregationKind agg,
                     Comparison cmp, double threshold) {
  Requirement req;
  req.label = label;
  req.field = field;
  req.aggregation = agg;
  req.comparison = cmp;
  req.threshold = threshold;
  return req;
}

RequirementSet thresholds_for(Difficulty difficulty, const std::string& target_id) {
  double vina = -7.77, nov = 0.80, dvs = 0.80, qed = 0.43, sas = 2.77, lip = 3.19;
  if (difficulty == Difficulty::Medium) {
    vina = -7.2; nov = 0.72; dvs = 0.78; qed = 0.33; sas = 3.3; lip = 2.95;
  } else if (difficulty == Difficulty::Easy) {
    vina = -3.0; nov = 0.50; dvs = 0.70; qed = 0.20; sas = 4.8; lip = 2.5;
  }
  RequirementSet reqs;
  reqs.target_id = target_id;
  reqs.requirements = {
      make_req("size", MetricField::PoolSize, AggregationKind::Cardinality, Comparison::Ge, 5),
      make_req("vina", MetricField::Docking, AggregationKind::WorstCaseMax, Comparison::Lt, vina),
      make_req("novelty", MetricField::Novelty, AggregationKind::SetFunctional, Comparison::Ge, nov),
      make_req("diversity", MetricField::Diversity, AggregationKind::SetFunctional, Comparison::Ge, dvs),
      make_req("qed", MetricField::Qed, AggregationKind::WorstCaseMin, Comparison::Gt, qed),
      make_req("sas", MetricField::Sas, AggregationKind::WorstCaseMax, Comparison::Lt, sas),
      make_req("lipinski", MetricField::Lipinski, AggregationKind::WorstCaseMin, Comparison::Ge, lip),
  };
  return reqs;
}

const char* kResidueNames[] = {"LEU", "VAL", "THR", "ILE", "LYS", "ALA",
                               "PHE", "GLU", "ARG", "SER", "TYR", "GLY"};

PocketSummary make_pocket(Rng& rng) {
  PocketSummary p;
  auto add = [&p](const std::string& key, const std::string& value) {
    p.entries.emplace_back(key, value);
  };
  add("atom_count", std::to_string(rng.uniform_int(220, 340)));
  add("residue_count", std::to_string(rng.uniform_int(28, 44)));
  add("chain_count", std::to_string(rng.uniform_int(1, 2)));
  add("box_size", "[" + fmt_fixed(rng.uniform(16.0, 28.0), 3) + ", " +
                      fmt_fixed(rng.uniform(16.0, 28.0), 3) + ", " +
                      fmt_fixed(rng.uniform(16.0, 28.0), 3) + "]");
  add("center", "[" + fmt_fixed(rng.uniform(-40.0, 40.0), 3) + ", " +
                    fmt_fixed(rng.uniform(-40.0, 40.0), 3) + ", " +
                    fmt_fixed(rng.uniform(-40.0, 40.0), 3) + "]");
  std::string top;
  for (int i = 0; i < 5; ++i) {
    if (i) top += ", ";
    top += std::string(kResidueNames[rng.uniform_int(0, 11)]) + "(" +
           std::to_string(rng.uniform_int(3, 6)) + ")";
  }
  add("top_residues", top);
  add("hydrophobic_ratio", fmt_fixed(rng.uniform(0.35, 0.65), 3));
  add("positive_ratio", fmt_fixed(rng.uniform(0.05, 0.20), 3));
  add("negative_ratio", fmt_fixed(rng.uniform(0.05, 0.20), 3));
  add("aromatic_ratio", fmt_fixed(rng.uniform(0.05, 0.25), 3));
  add("polar_ratio", fmt_fixed(rng.uniform(0.15, 0.40), 3));
  add("mean_pocket_depth", fmt_fixed(rng.uniform(6.0, 14.0), 1) + " A");
  add("volume_estimate", fmt_fixed(rng.uniform(420.0, 980.0), 0) + " A^3");
  add("surface_area", fmt_fixed(rng.uniform(300.0, 720.0), 0) + " A^2");
  add("flexibility_index", fmt_fixed(rng.uniform(0.10, 0.55), 3));
  std::string conserved;
  for (int i = 0; i < 4; ++i) {
    if (i) conserved += ", ";
    conserved += std::string(1, "KEDRHCSTNQ"[rng.uniform_int(0, 9)]) +
                 std::to_string(rng.uniform_int(550, 880));
  }
  add("conserved_residues", conserved);
  add("site_notes",
      "deep hydrophobic subpocket adjacent to the hinge; the solvent-exposed rim "
      "tolerates polar substitutions near the conserved lysine");
  return p;
}

struct Bands {
  double dock_lo, dock_hi;
  double qed_lo, qed_hi;
  double sas_lo, sas_hi;
  double lip_lo, lip_hi;
};

constexpr Bands kBulkBand = {-6.8, -4.2, 0.38, 0.92, 1.40, 3.10, 3.00, 4.00};
constexpr Bands kIslandBand = {-9.4, -8.1, 0.60, 0.90, 1.60, 2.40, 3.50, 4.00};

void stamp_novelty(Molecule& mol, const std::vector<Molecule>& reference) {
  mol.properties["novelty"] = novelty(mol, reference);
}

}  // namespace

std::string to_token(Difficulty difficulty) {
  switch (difficulty) {
    case Difficulty::Easy: return "easy";
    case Difficulty::Medium: return "medium";
    case Difficulty::Hard: return "hard";
  }
  return "hard";
}

Difficulty difficulty_from_token(const std::string& token) {
  if (token == "easy") return Difficulty::Easy;
  if (token == "medium") return Difficulty::Medium;
  if (token == "hard") return Difficulty::Hard;
  throw ConfigError("unknown difficulty token: " + token);
}

SyntheticTarget make_target(uint64_t seed, Difficulty difficulty) {
  SyntheticTarget target;
  target.seed = seed;
  target.difficulty = difficulty;
  target.target_id = "SYN-" + to_token(difficulty) + "-" + std::to_string(seed);
  target.requirements = thresholds_for(difficulty, target.target_id);

  Rng rng(derive_seed(seed, 101 + static_cast<uint64_t>(difficulty)));
  for (int i = 0; i < kReferenceCount; ++i) {
    Molecule ref;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "ref-%03d", i);
    ref.id = buf;
    ref.features = sample_tags(rng, kBulkFeatureCount, kRefTagLo, kRefTagHi);
    target.reference_library.push_back(std::move(ref));
  }
  target.pocket = make_pocket(rng);
  return target;
}

CandidatePool generate_pool(const SyntheticTarget& target, int n, const std::string& pool_id,
                            uint64_t seed) {
  if (n < 1) throw ExecutionError("generate needs n >= 1");
  Rng rng(derive_seed(seed, 17));
  CandidatePool pool;
  pool.id = pool_id;
  const int island_count = (n * 8 + 99) / 100;
  for (int i = 0; i < n; ++i) {
    const bool island = i < island_count;
    const Bands& band = island ? kIslandBand : kBulkBand;
    Molecule mol;
    char buf[16];
    std::snprintf(buf, sizeof(buf), ".m%03d", i);
    mol.id = pool_id + buf;
    mol.properties["docking"] = rng.uniform(band.dock_lo, band.dock_hi);
    mol.properties["qed"] = rng.uniform(band.qed_lo, band.qed_hi);
    mol.properties["sas"] = rng.uniform(band.sas_lo, band.sas_hi);
    mol.properties["lipinski"] = rng.uniform(band.lip_lo, band.lip_hi);
    mol.features = island ? sample_tags(rng, kIslandFeatureCount, kIslandTagLo, kIslandTagHi)
                          : sample_tags(rng, kBulkFeatureCount, kBulkTagLo, kBulkTagHi);
    stamp_novelty(mol, target.reference_library);
    pool.molecules.push_back(std::move(mol));
  }
  return pool;
}

namespace {

void clamp_property(std::map<std::string, double>& props, const std::string& key, double lo,
                    double hi) {
  props[key] = std::min(hi, std::max(lo, props[key]));
}

void improve(Rng& rng, Molecule& mol, const std::string& field, double scale) {
  if (field == "qed") {
    mol.properties["qed"] += rng.uniform(0.08, 0.20) * scale;
    clamp_property(mol.properties, "qed", 0.0, 1.0);
  } else if (field == "sas") {
    mol.properties["sas"] -= rng.uniform(0.30, 0.70) * scale;
    clamp_property(mol.properties, "sas", 0.15, 12.0);
  } else if (field == "lipinski") {
    mol.properties["lipinski"] += rng.uniform(0.20, 0.50) * scale;
    clamp_property(mol.properties, "lipinski", 0.0, 4.0);
  } else if (field == "novelty") {
    // Trade reference-overlapping tags for tags no reference carries.
    std::vector<int> shared;
    for (int tag : mol.features) {
      if (tag < kRefTagHi) shared.push_back(tag);
    }
    int swaps = std::min<int>(4, static_cast<int>(shared.size()));
    for (int s = 0; s < swaps; ++s) {
      mol.features.erase(shared[s]);
      while (!mol.features.insert(rng.uniform_int(kBulkTagHi, kIslandTagHi - 1)).second) {
      }
    }
  } else {  // docking and anything unrecognized
    mol.properties["docking"] -= rng.uniform(2.2, 3.0) * scale;
  }
}

void penalize(Rng& rng, Molecule& mol, const std::string& field, double scale) {
  if (field == "qed") {
    mol.properties["qed"] -= rng.uniform(0.005, 0.030) * scale;
    clamp_property(mol.properties, "qed", 0.0, 1.0);
  } else if (field == "sas") {
    mol.properties["sas"] += rng.uniform(0.02, 0.15) * scale;
  } else if (field == "lipinski") {
    mol.properties["lipinski"] -= rng.uniform(0.02, 0.08) * scale;
    clamp_property(mol.properties, "lipinski", 0.0, 4.0);
  } else {
    mol.properties["docking"] += rng.uniform(0.05, 0.25) * scale;
  }
}

}  // namespace

CandidatePool optimize_pool(const SyntheticTarget& target, const CandidatePool& source,
                            const std::string& objective_field, const std::string& pool_id,
                            uint64_t seed, double step_scale) {
  static const std::vector<std::string> kMutable = {"docking", "qed", "sas", "lipinski"};
  Rng rng(derive_seed(seed, 29));
  CandidatePool pool;
  pool.id = pool_id;
  pool.molecules = source.molecules;

  const std::string objective =
      std::find(kMutable.begin(), kMutable.end(), objective_field) != kMutable.end() ||
              objective_field == "novelty"
          ? objective_field
          : "docking";
  std::vector<std::string> penalty_pool;
  for (const std::string& f : kMutable) {
    if (f != objective) penalty_pool.push_back(f);
  }

  for (Molecule& mol : pool.molecules) {
    const bool improved = rng.chance(0.8);
    if (step_scale > 0.0 && improved) {
      improve(rng, mol, objective, step_scale);
      penalize(rng, mol, penalty_pool[rng.uniform_int(0, static_cast<int>(penalty_pool.size()) - 1)],
               step_scale);
    }
    if (step_scale > 0.0) {
      // Signature drift: swap up to two tags.
      const int swaps = rng.uniform_int(0, 2);
      for (int s = 0; s < swaps && !mol.features.empty(); ++s) {
        auto it = mol.features.begin();
        std::advance(it, rng.uniform_int(0, static_cast<int>(mol.features.size()) - 1));
        mol.features.erase(it);
        while (!mol.features.insert(rng.uniform_int(kBulkTagLo, kBulkTagHi - 1)).second) {
        }
      }
      stamp_novelty(mol, target.reference_library);
    }
  }
  return pool;
}

CandidatePool screen_pool(const std::vector<const CandidatePool*>& sources,
                          const std::vector<Requirement>& filters, int subset_size,
                          const std::string& pool_id) {
  if (sources.empty()) throw ExecutionError("screen needs at least one source pool");
  if (subset_size < 2) throw ExecutionError("screen subset size must be >= 2");

  std::set<std::string> seen;
  std::vector<const Molecule*> survivors;
  for (const CandidatePool* pool : sources) {
    for (const Molecule& mol : pool->molecules) {
      if (!seen.insert(mol.id).second) continue;
      bool keep = true;
      for (const Requirement& req : filters) {
        if (!is_per_molecule(req)) continue;
        auto it = mol.properties.find(property_name(req));
        if (it == mol.properties.end() ||
            !comparison_holds(req.comparison, it->second, req.threshold)) {
          keep = false;
          break;
        }
      }
      if (keep) survivors.push_back(&mol);
    }
  }

  CandidatePool out;
  out.id = pool_id;
  if (static_cast<int>(survivors.size()) <= subset_size) {
    for (const Molecule* mol : survivors) out.molecules.push_back(*mol);
    return out;
  }

  // Farthest-point greedy on Jaccard distance; ties and the first pick go
  // to the lexicographically smallest id.
  std::sort(survivors.begin(), survivors.end(),
            [](const Molecule* a, const Molecule* b) { return a->id < b->id; });
  std::vector<bool> taken(survivors.size(), false);
  std::vector<size_t> picked;
  picked.push_back(0);
  taken[0] = true;
  while (static_cast<int>(picked.size()) < subset_size) {
    double best_dist = -1.0;
    size_t best_idx = 0;
    for (size_t i = 0; i < survivors.size(); ++i) {
      if (taken[i]) continue;
      double min_dist = 2.0;
      for (size_t p : picked) {
        min_dist = std::min(min_dist, 1.0 - jaccard(survivors[i]->features, survivors[p]->features));
      }
      if (min_dist > best_dist) {
        best_dist = min_dist;
        best_idx = i;
      }
    }
    picked.push_back(best_idx);
    taken[best_idx] = true;
  }
  for (size_t idx : picked) out.molecules.push_back(*survivors[idx]);
  return out;
}

namespace {

struct ParsedPoolLine {
  std::string id;
  double score = 0.0;
};

struct ParsedCorrEntry {
  int iteration = 0;
  ActionBias bias = ActionBias::Generate;
  std::string dominant;
  std::string hint_pool;
};

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, eol - pos));
    pos = eol + 1;
  }
  return lines;
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    size_t end = pos;
    while (end < line.size() && line[end] != ' ') ++end;
    if (end > pos) tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

std::string value_of(const std::vector<std::string>& tokens, const std::string& key) {
  for (const std::string& token : tokens) {
    if (token.rfind(key + "=", 0) == 0) return token.substr(key.size() + 1);
  }
  return "";
}

struct ParsedState {
  std::vector<Requirement> requirements;
  std::vector<ParsedPoolLine> pools;
  std::vector<ParsedCorrEntry> corrective;
};

ParsedState parse_state(const std::string& text) {
  ParsedState out;
  for (const std::string& line : split_lines(text)) {
    const size_t req_pos = line.find("[req] ");
    if (req_pos != std::string::npos) {
      // "[req] label: field agg cmp threshold"
      const std::vector<std::string> tokens = split_tokens(line.substr(req_pos + 6));
      if (tokens.size() == 5 && !tokens[0].empty() && tokens[0].back() == ':') {
        try {
          Requirement req;
          req.label = tokens[0].substr(0, tokens[0].size() - 1);
          req.field = field_from_token(tokens[1], &req.custom_name);
          req.aggregation = aggregation_from_token(tokens[2]);
          req.comparison = comparison_from_token(tokens[3]);
          req.threshold = std::stod(tokens[4]);
          out.requirements.push_back(std::move(req));
        } catch (const std::exception&) {
          // Unparseable line: not a usable requirement, skip it.
        }
      }
      continue;
    }
    const size_t pool_pos = line.find("[pool] ");
    if (pool_pos != std::string::npos) {
      const std::vector<std::string> tokens = split_tokens(line.substr(pool_pos + 7));
      if (!tokens.empty()) {
        ParsedPoolLine entry;
        entry.id = tokens[0];
        const std::string score = value_of(tokens, "score");
        if (!score.empty()) {
          try {
            entry.score = std::stod(score);
          } catch (const std::exception&) {
            entry.score = 0.0;
          }
        }
        out.pools.push_back(std::move(entry));
      }
      continue;
    }
    const size_t corr_pos = line.find("[corr] ");
    if (corr_pos != std::string::npos) {
      const std::vector<std::string> tokens = split_tokens(line.substr(corr_pos + 7));
      ParsedCorrEntry entry;
      try {
        entry.iteration = std::stoi(value_of(tokens, "iter"));
        entry.bias = bias_from_token(value_of(tokens, "bias"));
      } catch (const std::exception&) {
        continue;
      }
      out.corrective.push_back(std::move(entry));
      continue;
    }
    if (!out.corrective.empty()) {
      const std::vector<std::string> tokens = split_tokens(line);
      const std::string dominant = value_of(tokens, "dominant");
      if (!dominant.empty()) out.corrective.back().dominant = dominant;
      const size_t hint_pool = line.find("pool MOL");
      if (hint_pool != std::string::npos) {
        size_t end = hint_pool + 5;
        while (end < line.size() && line[end] != ' ' && line[end] != ';' && line[end] != ',') ++end;
        out.corrective.back().hint_pool = line.substr(hint_pool + 5, end - hint_pool - 5);
      }
    }
  }
  return out;
}

std::string pick_target_pool(const ParsedState& state, const ParsedCorrEntry& entry,
                             const PoolRegistry& registry) {
  const ParsedPoolLine* best = nullptr;
  for (const ParsedPoolLine& pool : state.pools) {
    if (!registry.contains(pool.id)) continue;
    if (!best || pool.score > best->score) best = &pool;
  }
  if (best) return best->id;
  if (!entry.hint_pool.empty() && registry.contains(entry.hint_pool)) return entry.hint_pool;
  if (!registry.empty()) return registry.pools().back().id;
  return "";
}

}  // namespace

Action heuristic_planner(const std::string& state_text, const PoolRegistry& registry,
                         uint64_t /*seed*/) {
  const ParsedState state = parse_state(state_text);

  Action generate;
  generate.kind = ActionBias::Generate;
  generate.sample_count = 100;
  if (state.corrective.empty()) return generate;

  const ParsedCorrEntry* latest = &state.corrective.front();
  for (const ParsedCorrEntry& entry : state.corrective) {
    if (entry.iteration >= latest->iteration) latest = &entry;
  }
  if (latest->bias == ActionBias::Generate) return generate;

  const std::string target_pool = pick_target_pool(state, *latest, registry);
  if (target_pool.empty()) return generate;

  if (latest->bias == ActionBias::Optimize) {
    Action action;
    action.kind = ActionBias::Optimize;
    action.pool_ids = {target_pool};
    action.objective_field = latest->dominant.empty() ? "docking" : latest->dominant;
    return action;
  }

  // CodeScreen needs the requirement thresholds as filters.
  if (state.requirements.empty()) return generate;
  RequirementSet parsed;
  parsed.requirements = state.requirements;
  Action action;
  action.kind = ActionBias::CodeScreen;
  action.pool_ids = {target_pool};
  action.subset_size = std::max(2, required_pool_size(parsed));
  for (const Requirement& req : state.requirements) {
    if (is_per_molecule(req)) action.filters.push_back(req);
  }
  return action;
}

Planner make_planner() {
  return [](const std::string& text, const PoolRegistry& registry, uint64_t seed) {
    return heuristic_planner(text, registry, seed);
  };
}

Executor make_executor(const SyntheticTarget& target) {
  return [target](const Action& action, const PoolRegistry& registry,
                  const std::string& fresh_pool_id, uint64_t seed) -> CandidatePool {
    switch (action.kind) {
      case ActionBias::Generate:
        return generate_pool(target, std::max(1, action.sample_count), fresh_pool_id, seed);
      case ActionBias::Optimize: {
        if (action.pool_ids.empty()) throw ExecutionError("optimize action lacks a source pool");
        const CandidatePool& source = registry.at(action.pool_ids.front());
        return optimize_pool(target, source, action.objective_field, fresh_pool_id, seed);
      }
      case ActionBias::CodeScreen: {
        if (action.pool_ids.empty()) throw ExecutionError("screen action lacks source pools");
        std::vector<const CandidatePool*> sources;
        for (const std::string& id : action.pool_ids) sources.push_back(&registry.at(id));
        return screen_pool(sources, action.filters, action.subset_size, fresh_pool_id);
      }
    }
    throw ExecutionError("unhandled action kind");
  };
}

EpisodeContext make_context(const SyntheticTarget& target) {
  return EpisodeContext{target.target_id, target.pocket, target.requirements};
}

EpisodeResult run_synthetic_episode(uint64_t seed, Difficulty difficulty, Mode mode,
                                    const Budgets& budgets, bool full_horizon,
                                    const PlannerInputObserver& observer) {
  const SyntheticTarget target = make_target(seed, difficulty);
  LoopConfig config;
  config.budgets = budgets;
  config.mode = mode;
  config.seed = seed;
  config.full_horizon = full_horizon;
  return run_episode(make_context(target), make_planner(), make_executor(target), config, observer);
}

}  // namespace cacm
