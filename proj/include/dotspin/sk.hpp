// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>

#include "dotspin/common.hpp"

namespace dotspin::electronic {

enum class BasisTier { s_only, sp3s, sp3d5s };

BasisTier tier_from_string(const std::string& s);
const char* to_string(BasisTier t);

/// Orbitals per site.  Ordering (stable, used in all exports):
///   s_only:   [s]
///   sp3s*:    [s, px, py, pz, s*]
///   sp3d5s*:  [s, px, py, pz, dxy, dyz, dzx, dx2-y2, dz2, s*]
int orbital_count(BasisTier t);
int sstar_index(BasisTier t);  // -1 when the tier has no s*

/// Two-center integrals for an oriented bond (atom 1 -> atom 2); "12"/"21"
/// distinguish which atom carries the lower-l orbital.  Unused entries are
/// zero.
struct TwoCenterIntegrals {
    double ss_sigma = 0.0;
    double sp_sigma = 0.0;        // s(1) - p(2)
    double ps_sigma = 0.0;        // p(1) - s(2)
    double pp_sigma = 0.0;
    double pp_pi = 0.0;
    double sstar_s_sigma = 0.0;   // s*(1) - s(2)
    double s_sstar_sigma = 0.0;   // s(1) - s*(2)
    double sstar_p_sigma = 0.0;   // s*(1) - p(2)
    double p_sstar_sigma = 0.0;   // p(1) - s*(2)
    double sstar_sstar_sigma = 0.0;
    double sd_sigma = 0.0;        // s(1) - d(2)
    double ds_sigma = 0.0;        // d(1) - s(2)
    double pd_sigma = 0.0;        // p(1) - d(2)
    double pd_pi = 0.0;
    double dp_sigma = 0.0;        // d(1) - p(2)
    double dp_pi = 0.0;
    double dd_sigma = 0.0;
    double dd_pi = 0.0;
    double dd_delta = 0.0;
    double sstar_d_sigma = 0.0;   // s*(1) - d(2)
    double d_sstar_sigma = 0.0;   // d(1) - s*(2)

    /// Integrals for the reversed bond orientation (atom 2 -> atom 1).
    TwoCenterIntegrals reversed() const;
};

/// Slater-Koster direction-cosine block <mu(1)|H|nu(2)> for a bond with unit
/// direction (l,m,n) from atom 1 to atom 2.  Row index mu runs over atom 1
/// orbitals, column nu over atom 2.  Requires l^2+m^2+n^2 = 1 to 1e-12.
std::array<double, 10 * 10> slater_koster_block(double l, double m, double n,
                                                const TwoCenterIntegrals& v,
                                                BasisTier tier);

/// Harrison bond-length power law: V * (d0/d)^eta.
double strain_scale(double integral, double d0, double d, double eta);

} // namespace dotspin::electronic
