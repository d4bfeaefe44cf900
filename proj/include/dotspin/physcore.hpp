// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dotspin/common.hpp"

namespace dotspin::physcore {

// All quantities are kept in Gaussian-CGS units internally: densities in
// cm^-3, magnetic fields in Gauss, energies in erg.  Electronic-structure
// modules work in eV and nm and convert at their boundaries.

struct PhysicalConstants {
    double bohr_magneton_erg_per_G = 9.2740100783e-21;
    double nuclear_magneton_erg_per_G = 5.0507837461e-24;
    double hbar_erg_s = 1.054571817e-27;
    double erg_per_eV = 1.602176634e-12;

    double bohr_magneton_eV_per_T() const {
        return bohr_magneton_erg_per_G * 1.0e4 / erg_per_eV;
    }
    void validate() const;
};

inline constexpr double kGaussPerTesla = 1.0e4;

/// One nuclear species with its calibrated on-site orbital densities.
/// Densities are |phi(0)|^2 in cm^-3; the ratio r = phi_s*(0)/phi_s(0)
/// is signed, densities are not.
struct NuclearSpecies {
    std::string name;          // element symbol, e.g. "In"
    std::string host;          // binary compound the densities refer to, e.g. "InAs"
    double spin = 0.0;         // nuclear spin quantum number I
    double g_factor = 0.0;     // nuclear g factor
    double density_s = 0.0;    // |phi_s(0)|^2, cm^-3
    double density_sstar = 0.0;// |phi_s*(0)|^2, cm^-3
    double orbital_ratio = 0.0;// phi_s*(0)/phi_s(0), signed

    void validate() const;
};

/// Bulk conduction-edge data used to deduce the on-site orbital densities.
struct BulkCalibrationInput {
    std::string atom;
    std::string host;
    double bulk_density = 0.0; // |psi(0)|^2 of the bulk conduction edge, cm^-3
    double alpha = 0.0;        // s coefficient of the bulk band-edge state
    double beta = 0.0;         // s* coefficient
    double orbital_ratio = 0.0;// phi_s*(0)/phi_s(0) for this atom
};

struct CalibratedDensities {
    double density_s = 0.0;     // |phi_s(0)|^2, cm^-3
    double density_sstar = 0.0; // |phi_s*(0)|^2, cm^-3
};

/// Keating bond/angle constants, eV/nm^2 in the 3a/8d0^2 convention.
struct VffParameters {
    double alpha = 0.0;
    double beta = 0.0;
    std::string provenance;
};

struct MaterialRecord {
    std::string name;            // binary compound, e.g. "GaAs"
    std::string cation, anion;   // element symbols
    double lattice_constant_nm = 0.0;
    VffParameters vff;
    std::string tb_parameter_set;// identifier matching a TB parameter file
    double g_electron = 2.0;

    double ideal_bond_length_nm() const {
        return lattice_constant_nm * std::sqrt(3.0) / 4.0;
    }
    void validate() const;
};

/// Immutable after load; safe to share across threads.
class Database {
public:
    PhysicalConstants constants;
    int schema_version = 0;

    /// Bulk conduction-edge rows shipped with the database; inputs for
    /// calibrate_orbital_densities.
    std::vector<BulkCalibrationInput> calibration_inputs;

    const NuclearSpecies& species(const std::string& name) const;

    /// Species record specialized for a host compound when one exists,
    /// otherwise the element's default record.
    const NuclearSpecies& species_in_host(const std::string& name,
                                          const std::string& host) const;

    bool has_species(const std::string& name) const;
    const MaterialRecord& material(const std::string& name) const;
    bool has_material(const std::string& name) const;

    std::vector<std::string> species_names() const;
    std::vector<std::string> material_names() const;

    void add_species(NuclearSpecies s);
    void add_material(MaterialRecord m);
    void validate() const;

private:
    std::map<std::string, NuclearSpecies> species_;          // key: name
    std::map<std::string, NuclearSpecies> species_by_host_;  // key: name@host
    std::map<std::string, MaterialRecord> materials_;
};

/// Parse and validate the bundled JSON database format (schema documented
/// in data/physdb.json).  Throws InputError naming the offending key.
Database load_database(const std::string& path);

/// Invert |psi(0)|^2 = |alpha phi_s(0) + beta phi_s*(0)|^2 together with
/// phi_s*(0) = r phi_s(0) for the two orbital densities.
CalibratedDensities calibrate_orbital_densities(const BulkCalibrationInput& in);

/// Scale a measured reference density by an atomic-density ratio.
double deduce_bulk_density(double reference_density, double atomic_ratio);

} // namespace dotspin::physcore
