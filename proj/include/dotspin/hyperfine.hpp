// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dotspin/electronic.hpp"
#include "dotspin/geometry.hpp"
#include "dotspin/physcore.hpp"

namespace dotspin::hyperfine {

/// Per-nucleus hyperfine coupling constants A_j.  Couplings are reported in
/// eV; contact densities in cm^-3.
struct HyperfineMap {
    std::vector<double> coupling_eV;
    std::vector<double> contact_density_cm3;
    std::string structure_id;
    std::string wavefunction_id;

    std::size_t size() const { return coupling_eV.size(); }
    double max_coupling_eV() const;
    std::size_t argmax_site() const;
};

/// Contact density |alpha phi_s(0) + beta phi_s*(0)|^2 at one site; phi
/// values are the positive square roots of the calibrated densities, the
/// s* sign comes from the species orbital ratio.
double contact_density(const electronic::WaveFunction& wf, std::size_t site,
                       const physcore::NuclearSpecies& species);

/// A_j = (16 pi / 3) mu_B mu_N g_j |psi(R_j)|^2 over all sites.  Species
/// records are resolved per site: cations by their own binary, anions by
/// the majority binary among their cation neighbors (ties toward the dot
/// material).
HyperfineMap coupling_map(const electronic::WaveFunction& wf,
                          const geometry::AtomisticStructure& s,
                          const physcore::Database& db,
                          const geometry::NeighborTable* nbr = nullptr);

/// |{j : A_j > fraction * max A}|
std::size_t reach_count(const HyperfineMap& map, double fraction);

/// mean anion A / mean cation A over the sites with A above
/// threshold_fraction * max (the nuclei the electron actually reaches)
double anion_cation_ratio(const HyperfineMap& map,
                          const geometry::AtomisticStructure& s,
                          double threshold_fraction = 0.01);

struct ProfilePoint {
    double coordinate_nm = 0.0;
    double coupling_eV = 0.0;
};

struct Profile {
    char axis = 'x';
    std::vector<ProfilePoint> points;      // ordered by coordinate
    double interface_lo_nm = 0.0;          // lens surface crossings
    double interface_hi_nm = 0.0;
};

/// Couplings along a line through the lens center (axis 'x' or 'z'),
/// taking sites within half a bond length of the line.  bin_width > 0
/// averages points into bins along the coordinate.
Profile profile(const HyperfineMap& map, const geometry::AtomisticStructure& s,
                char axis, double bin_width_nm);

/// 1/e decay length of the profile outside the lens surface, on the
/// positive-coordinate side.
double decay_length(const Profile& p);

void export_map(const HyperfineMap& map, const geometry::AtomisticStructure& s,
                const std::string& path);
void export_profile(const Profile& p, const std::string& path);

} // namespace dotspin::hyperfine
