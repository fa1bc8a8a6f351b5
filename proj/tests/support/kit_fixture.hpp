#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "cacm/memory.hpp"
#include "cacm/protocol.hpp"

/*
 * KIT target fixtures shared by the unit and acceptance suites. The audit
 * pool is built so the aggregated statistics are exact by construction:
 * worst docking -7.358 against the -7.77 bound, 24 molecules individually
 * clearing every per-molecule threshold, and marginal novelty / qed /
 * lipinski violations small enough that the docking gap dominates severity.
 */

namespace kitfx {

inline cacm::RequirementSet load_kit_requirements() {
  return cacm::load_requirements_file(std::string(CACM_DATA_DIR) + "/kit_requirements.json");
}

inline cacm::PocketSummary kit_pocket() {
  cacm::PocketSummary p;
  p.entries = {
      {"atom_count", "277"},
      {"residue_count", "36"},
      {"chain_count", "1"},
      {"box_size", "[20.348, 24.401, 24.296]"},
      {"center", "[34.162, 14.721, 39.277]"},
      {"top_residues", "LEU(5), VAL(5), THR(4), ILE(4), LYS(3)"},
      {"hydrophobic_ratio", "0.528"},
      {"positive_ratio", "0.111"},
      {"negative_ratio", "0.083"},
      {"aromatic_ratio", "0.111"},
  };
  return p;
}

// Single reference molecule with tags 0..47; pool molecules control their
// novelty exactly through the overlap size c: novelty = 1 - c / (96 - c).
inline std::vector<cacm::Molecule> kit_reference() {
  cacm::Molecule ref;
  ref.id = "ref-kit";
  for (int t = 0; t < 48; ++t) ref.features.insert(t);
  return {ref};
}

inline cacm::Molecule kit_molecule(int index, double docking, double qed, double sas,
                                   double lipinski, int reference_overlap) {
  cacm::Molecule mol;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "MOL002.m%03d", index);
  mol.id = buf;
  mol.properties["docking"] = docking;
  mol.properties["qed"] = qed;
  mol.properties["sas"] = sas;
  mol.properties["lipinski"] = lipinski;
  for (int t = 0; t < reference_overlap; ++t) mol.features.insert(t);
  // Private block per molecule keeps pairwise similarity at the shared
  // reference tags only.
  for (int t = 0; t < 48 - reference_overlap; ++t) mol.features.insert(1000 + 100 * index + t);
  mol.properties["novelty"] =
      1.0 - static_cast<double>(reference_overlap) / (96.0 - reference_overlap);
  return mol;
}

// 100 molecules; gate outcome on the KIT requirements:
//   size 100 pass, vina worst -7.358 fail, novelty min 17/79 overlap fail,
//   diversity ~0.9 pass, qed min 0.425 fail, sas max 2.70 pass,
//   lipinski min 3.15 fail. Exactly 24 molecules are fully compliant.
inline cacm::CandidatePool kit_audit_pool() {
  cacm::CandidatePool pool;
  pool.id = "MOL002";
  pool.created_at_iteration = 2;
  for (int i = 0; i < 24; ++i) {
    pool.molecules.push_back(kit_molecule(i, -8.0 - 0.01 * i, 0.50 + 0.005 * i, 2.0 + 0.01 * i,
                                          3.30 + 0.01 * i, 8));
  }
  pool.molecules.push_back(kit_molecule(24, -7.358, 0.60, 2.30, 3.50, 8));  // worst docking
  pool.molecules.push_back(kit_molecule(25, -7.50, 0.425, 2.20, 3.40, 8));  // worst qed
  pool.molecules.push_back(kit_molecule(26, -7.45, 0.50, 2.10, 3.15, 8));   // worst lipinski
  pool.molecules.push_back(kit_molecule(27, -7.60, 0.50, 2.10, 3.40, 17));  // worst novelty
  for (int i = 28; i < 100; ++i) {
    pool.molecules.push_back(kit_molecule(i, -7.40 - 0.004 * (i - 28), 0.50 + 0.003 * (i - 28),
                                          2.0 + 0.009 * (i - 28), 3.25 + 0.008 * (i - 28), 8));
  }
  return pool;
}

// Retained pool summaries for the dynamic-channel fixtures; quality scores
// are stored fixture values used for ranking, not recomputations.
inline std::vector<cacm::PoolSummary> kit_pool_summaries() {
  cacm::PoolSummary a{"MOL001", 1, 100, 0.8781, -3.932, 0.695, 0.343, 5.229, 3.41, 0.6615};
  cacm::PoolSummary b{"MOL002", 2, 100, 0.8592, -7.358, 0.685, 0.212, 4.682, 3.15, 0.6570};
  cacm::PoolSummary c{"MOL003", 3, 100, 0.8487, -3.676, 0.685, 0.306, 2.769, 3.38, 0.6413};
  return {a, b, c};
}

inline std::vector<cacm::ActionRecord> kit_action_records() {
  return {
      {1, cacm::ActionBias::Generate, "MOL001", false},
      {2, cacm::ActionBias::Optimize, "MOL002", false},
      {3, cacm::ActionBias::Optimize, "MOL003", false},
  };
}

}  // namespace kitfx
