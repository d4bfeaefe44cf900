// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dotspin/sk.hpp"

namespace dotspin::electronic {

struct OrbitalEnergies {
    double s = 0.0, p = 0.0, d = 0.0, sstar = 0.0;
};

/// Onsite energy per orbital slot in the tier's ordering.
std::vector<double> onsite_vector(const OrbitalEnergies& e, BasisTier tier);

struct TbMaterial {
    std::string name;
    /// Rigid shift applied to all onsite energies (band alignment between
    /// materials, e.g. the valence-band offset).
    double energy_shift_eV = 0.0;
    /// Unstrained bond length of this binary; reference for Harrison
    /// scaling and Lowdin corrections.  0 = use the substrate grid length.
    double d0_nm = 0.0;
    OrbitalEnergies onsite_anion;
    OrbitalEnergies onsite_cation;
    /// Bond integrals oriented anion(1) -> cation(2).
    TwoCenterIntegrals integrals;
    /// Linear onsite strain coefficients (per unit relative bond-length
    /// change, averaged over the site's bonds); absent = correction off.
    std::optional<OrbitalEnergies> lowdin_anion;
    std::optional<OrbitalEnergies> lowdin_cation;
};

class TbParameterSet {
public:
    std::string name;
    BasisTier tier = BasisTier::sp3s;
    double harrison_eta = 2.0;
    std::map<std::string, double> eta_overrides;  // per integral field
    std::map<std::string, TbMaterial> materials;
    /// Documented band targets of this set (e.g. "gap_GaAs"), used by the
    /// bulk-dispersion checks.
    std::map<std::string, double> targets;

    const TbMaterial& material(const std::string& name) const;
    double eta(const std::string& field) const;

    static TbParameterSet load(const std::string& path);
};

/// Scale every bond integral by (d0/d)^eta with per-field overrides.
TwoCenterIntegrals scale_integrals(const TwoCenterIntegrals& v, const TbParameterSet& set,
                                   double d0, double d);

} // namespace dotspin::electronic
