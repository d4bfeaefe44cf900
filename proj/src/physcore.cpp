// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include "dotspin/physcore.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace dotspin::physcore {

using nlohmann::json;

void PhysicalConstants::validate() const {
    if (bohr_magneton_erg_per_G <= 0 || nuclear_magneton_erg_per_G <= 0 ||
        hbar_erg_s <= 0 || erg_per_eV <= 0) {
        throw InputError("physical constants must be strictly positive");
    }
    const double ratio = nuclear_magneton_erg_per_G / bohr_magneton_erg_per_G;
    if (std::abs(ratio / 5.446e-4 - 1.0) > 5e-4) {
        throw InputError("mu_N/mu_B deviates from the electron/proton mass ratio");
    }
}

void NuclearSpecies::validate() const {
    if (name.empty()) throw InputError("species with empty name");
    if (spin < 0 || std::abs(spin * 2 - std::round(spin * 2)) > 1e-12) {
        throw InputError("species '" + name + "': spin must be a non-negative half-integer");
    }
    if (density_s < 0) {
        throw InputError("species '" + name + "': negative density_s");
    }
    if (density_sstar < 0) {
        throw InputError("species '" + name + "': negative density_sstar");
    }
    if (density_s > 0) {
        const double expect = orbital_ratio * orbital_ratio * density_s;
        if (std::abs(expect - density_sstar) > 1e-6 * std::max(density_sstar, density_s)) {
            throw InputError("species '" + name +
                             "': density_sstar inconsistent with orbital_ratio^2 * density_s");
        }
    }
}

void MaterialRecord::validate() const {
    if (name.empty()) throw InputError("material with empty name");
    if (lattice_constant_nm <= 0) {
        throw InputError("material '" + name + "': lattice constant must be positive");
    }
    if (g_electron == 0.0) {
        throw InputError("material '" + name + "': electron g factor must be nonzero");
    }
    if (vff.alpha <= 0 || vff.beta <= 0) {
        throw InputError("material '" + name + "': VFF constants must be positive");
    }
}

const NuclearSpecies& Database::species(const std::string& name) const {
    auto it = species_.find(name);
    if (it == species_.end()) throw InputError("unknown species '" + name + "'");
    return it->second;
}

const NuclearSpecies& Database::species_in_host(const std::string& name,
                                                const std::string& host) const {
    auto it = species_by_host_.find(name + "@" + host);
    if (it != species_by_host_.end()) return it->second;
    return species(name);
}

bool Database::has_species(const std::string& name) const {
    return species_.count(name) > 0;
}

const MaterialRecord& Database::material(const std::string& name) const {
    auto it = materials_.find(name);
    if (it == materials_.end()) throw InputError("unknown material '" + name + "'");
    return it->second;
}

bool Database::has_material(const std::string& name) const {
    return materials_.count(name) > 0;
}

std::vector<std::string> Database::species_names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : species_) out.push_back(k);
    return out;
}

std::vector<std::string> Database::material_names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : materials_) out.push_back(k);
    return out;
}

void Database::add_species(NuclearSpecies s) {
    s.validate();
    if (s.host.empty()) {
        species_[s.name] = s;
    } else {
        species_by_host_[s.name + "@" + s.host] = s;
        // First host entry for an element doubles as its default record.
        if (!species_.count(s.name)) species_[s.name] = s;
    }
}

void Database::add_material(MaterialRecord m) {
    m.validate();
    materials_[m.name] = std::move(m);
}

void Database::validate() const {
    constants.validate();
    for (const auto& [name, mat] : materials_) {
        if (!species_.count(mat.cation)) {
            throw InputError("material '" + name + "' references unknown cation '" +
                             mat.cation + "'");
        }
        if (!species_.count(mat.anion)) {
            throw InputError("material '" + name + "' references unknown anion '" +
                             mat.anion + "'");
        }
    }
}

namespace {

double require_number(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key) || !j[key].is_number()) {
        throw InputError("database: missing or non-numeric key '" + key + "' in " + ctx);
    }
    return j[key].get<double>();
}

std::string require_string(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw InputError("database: missing or non-string key '" + key + "' in " + ctx);
    }
    return j[key].get<std::string>();
}

} // namespace

Database load_database(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("database file not found: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InputError("database '" + path + "': " + e.what());
    }

    Database db;
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
        throw InputError("database '" + path + "': missing schema_version");
    }
    db.schema_version = j["schema_version"].get<int>();

    if (j.contains("constants")) {
        const json& c = j["constants"];
        db.constants.bohr_magneton_erg_per_G =
            require_number(c, "bohr_magneton_erg_per_G", "constants");
        db.constants.nuclear_magneton_erg_per_G =
            require_number(c, "nuclear_magneton_erg_per_G", "constants");
        db.constants.hbar_erg_s = require_number(c, "hbar_erg_s", "constants");
        db.constants.erg_per_eV = require_number(c, "erg_per_eV", "constants");
    }

    if (!j.contains("species") || !j["species"].is_array()) {
        throw InputError("database '" + path + "': missing species array");
    }
    for (const json& s : j["species"]) {
        NuclearSpecies sp;
        sp.name = require_string(s, "name", "species entry");
        sp.host = s.value("host", std::string{});
        sp.spin = require_number(s, "spin", "species '" + sp.name + "'");
        sp.g_factor = require_number(s, "g_factor", "species '" + sp.name + "'");
        sp.density_s = require_number(s, "density_s_cm3", "species '" + sp.name + "'");
        sp.density_sstar =
            require_number(s, "density_sstar_cm3", "species '" + sp.name + "'");
        sp.orbital_ratio =
            require_number(s, "orbital_ratio", "species '" + sp.name + "'");
        db.add_species(std::move(sp));
    }

    if (j.contains("appendix_calibration")) {
        for (const json& r : j["appendix_calibration"]) {
            BulkCalibrationInput row;
            row.atom = require_string(r, "atom", "appendix_calibration entry");
            row.host = require_string(r, "host", "appendix_calibration entry");
            const std::string ctx = row.atom + " in " + row.host;
            row.alpha = require_number(r, "alpha", ctx);
            row.beta = require_number(r, "beta", ctx);
            row.orbital_ratio = require_number(r, "orbital_ratio", ctx);
            const double ref = require_number(r, "reference_density_cm3", ctx);
            const double ratio = require_number(r, "atomic_ratio", ctx);
            row.bulk_density = deduce_bulk_density(ref, ratio);
            db.calibration_inputs.push_back(std::move(row));
        }
    }

    if (!j.contains("materials") || !j["materials"].is_array()) {
        throw InputError("database '" + path + "': missing materials array");
    }
    for (const json& m : j["materials"]) {
        MaterialRecord mat;
        mat.name = require_string(m, "name", "material entry");
        mat.cation = require_string(m, "cation", "material '" + mat.name + "'");
        mat.anion = require_string(m, "anion", "material '" + mat.name + "'");
        mat.lattice_constant_nm =
            require_number(m, "lattice_constant_nm", "material '" + mat.name + "'");
        mat.vff.alpha =
            require_number(m, "vff_alpha_eV_nm2", "material '" + mat.name + "'");
        mat.vff.beta =
            require_number(m, "vff_beta_eV_nm2", "material '" + mat.name + "'");
        mat.vff.provenance = m.value("vff_provenance", std::string{});
        mat.tb_parameter_set = m.value("tb_parameter_set", std::string{});
        mat.g_electron = m.contains("g_electron") ? m["g_electron"].get<double>() : 2.0;
        db.add_material(std::move(mat));
    }

    db.validate();
    return db;
}

CalibratedDensities calibrate_orbital_densities(const BulkCalibrationInput& in) {
    if (in.bulk_density < 0) {
        throw InputError("calibration '" + in.atom + " in " + in.host +
                         "': negative bulk density");
    }
    const double combo = in.alpha + in.beta * in.orbital_ratio;
    if (combo == 0.0) {
        throw InputError("calibration '" + in.atom + " in " + in.host +
                         "': alpha + beta*r = 0, linear combination is singular");
    }
    CalibratedDensities out;
    out.density_s = in.bulk_density / (combo * combo);
    out.density_sstar = in.orbital_ratio * in.orbital_ratio * out.density_s;
    return out;
}

double deduce_bulk_density(double reference_density, double atomic_ratio) {
    if (reference_density <= 0) throw InputError("reference density must be positive");
    if (atomic_ratio <= 0) throw InputError("atomic-density ratio must be positive");
    return reference_density * atomic_ratio;
}

} // namespace dotspin::physcore
