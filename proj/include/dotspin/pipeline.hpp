// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dotspin/electronic.hpp"
#include "dotspin/geometry.hpp"
#include "dotspin/spinbath.hpp"

namespace dotspin::pipeline {

struct SizeVariant {
    double diameter_nm = 0.0;
    double height_nm = 0.0;
};

struct RunConfig {
    std::string database_path = "data/physdb.json";
    std::string parameter_set_path = "data/tb_desk_sp3s.json";
    std::string output_dir = "out";

    geometry::DotGeometry geom;

    // size-distribution variants; empty = base +/- 1 nm diameter, 0.5 nm height
    std::vector<SizeVariant> size_variants;

    double alloy_fraction = 0.5;
    double interface_thickness_nm = 1.25;
    int alloy_realizations = 3;

    bool strain_enabled = false;
    double strain_tol_eV_nm = 1e-4;
    int strain_max_iterations = 2000;

    std::string tier = "sp3s*";
    std::string sigma_mode = "midgap";  // midgap | conduction | explicit
    double sigma_eV = 0.0;
    int n_states = 4;
    double solver_tol_eV = 1e-7;
    int solver_max_iterations = 4000;

    std::vector<std::string> sources = {"unpolarized", "size", "alloy", "interface"};
    std::size_t mc_samples = 1000;
    Vec3 polarization_axis{0, 0, 1};

    double budget_J_eV = 5e-4;
    double budget_B0_T = 1.0;
    double budget_Bac_T = 1e-3;
    double budget_threshold = 1e-4;
    std::string budget_zeeman_source = "unpolarized";
    double budget_orbital_spacing_eV = 0.0;  // 0 = from the base solve
    double budget_B_perp_T = 0.0;            // 0 = from the unpolarized source

    std::uint64_t master_seed = 42;

    static RunConfig from_file(const std::string& path);
    static RunConfig defaults() { return RunConfig{}; }
    std::string to_json() const;
};

/// Human-readable validation problems; empty = valid.
std::vector<std::string> validate(const RunConfig& cfg);

struct StageRecord {
    std::string hash;
    std::string status;  // done | skipped | failed | disabled
    std::vector<std::string> outputs;
};

struct RunManifest {
    std::string config_hash;
    std::map<std::string, StageRecord> stages;
    std::string status;  // ok | partial

    void save(const std::string& path) const;
    static RunManifest load(const std::string& path);
};

inline const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names = {
        "geometry", "strain", "electronic", "hyperfine", "spinbath", "errorbudget"};
    return names;
}

/// Execute stages in dependency order up to `last_stage` (default: all),
/// skipping stages whose input hash matches the stored manifest and whose
/// outputs exist.  Stage timings go to a separate sidecar so every
/// machine-readable artifact is byte-reproducible.
RunManifest run(const RunConfig& cfg, const std::string& last_stage = "");

/// Render a finished run into a human summary (stdout).
void report(const std::string& output_dir);

std::string hash_file(const std::string& path);
std::string hash_bytes(const std::string& bytes);

} // namespace dotspin::pipeline
