#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dirsol/experiments.hpp"

namespace dirsol {

namespace fs = std::filesystem;

// Flat INI text: sections [grid], [rho], [run], [soliton], [perturbation], [fit].
// Vectors are written "x, y, z". Unknown keys are rejected.
RunConfig load_config(const fs::path& path, RunConfig base = {});
void save_config(const fs::path& path, const RunConfig& cfg);

std::string code_version();

// Everything needed to repeat the run: config (verbatim), code version, seed, thread count.
nlohmann::json config_to_json(const RunConfig& cfg);
void write_manifest(const fs::path& dir, const RunConfig& cfg, const nlohmann::json& results);
void write_json(const fs::path& path, const nlohmann::json& j);

// particle.csv: t,q1,q2,q3,p1,p2,p3
void write_particle_csv(const fs::path& path, const Trajectory& tr);
// modulation.csv: t,b1,b2,b3,v1,v2,v3,z_norm,majorant,iterations
void write_modulation_csv(const fs::path& path, const Trajectory& tr);
// decay.csv: t,weighted_norm
void write_decay_csv(const fs::path& path, const DecayReport& r);

// Snapshot: <stem>.bin holds raw little-endian f64 pairs (re, im), point-major with 4 components per
// grid node, position representation; <stem>.json describes grid, time, q and p.
void write_snapshot(const fs::path& dir, const std::string& stem, double t, const PhaseState& Y);
PhaseState load_snapshot(const fs::path& descriptor);

}  // namespace dirsol
