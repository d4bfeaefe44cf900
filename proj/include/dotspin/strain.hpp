// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dotspin/common.hpp"
#include "dotspin/geometry.hpp"
#include "dotspin/physcore.hpp"

namespace dotspin::strain {

/// Keating bond parameters compiled per species pair present in a structure.
/// alpha/beta are in eV/nm^2 (3a/8d0^2 convention), d0 in nm.
class VffModel {
public:
    struct BondParams {
        double alpha = 0.0;
        double beta = 0.0;
        double d0 = 0.0;
    };

    static VffModel from_database(const physcore::Database& db,
                                  const geometry::AtomisticStructure& s);

    const BondParams& bond(std::uint8_t cation_species,
                           std::uint8_t anion_species) const;

private:
    // indexed [cation species][anion species] in structure species numbering
    std::vector<std::vector<BondParams>> params_;
    std::vector<std::vector<bool>> present_;
};

struct BondGeometry {
    std::int32_t i = -1, j = -1;  // i cation, j anion
    double length_nm = 0.0;
    Vec3 direction;               // unit vector from i to j
};

struct RelaxationResult {
    std::vector<Vec3> positions;
    double energy_eV = 0.0;
    double gradient_norm = 0.0;   // max per-atom force magnitude, eV/nm
    int iterations = 0;
    bool converged = false;
};

struct RelaxOptions {
    double tolerance_eV_per_nm = 1e-6;
    int max_iterations = 5000;
    /// Sites within this distance of a box face are pinned to the ideal
    /// grid (ignored for periodic structures).
    double pin_shell_nm = 0.6;
};

class VffSystem {
public:
    VffSystem(const geometry::AtomisticStructure& s, VffModel model,
              RelaxOptions options = {});

    double energy(const std::vector<Vec3>& positions) const;
    /// dE/dx per site; pinned sites get zero.  Matches central finite
    /// differences of energy().
    void gradient(const std::vector<Vec3>& positions,
                  std::vector<Vec3>& grad) const;

    RelaxationResult relax() const;
    RelaxationResult relax(std::vector<Vec3> start) const;

    std::vector<Vec3> ideal_positions() const;
    const geometry::NeighborTable& neighbors() const { return nbr_; }
    bool pinned(std::size_t i) const { return pinned_[i] != 0; }

    /// Per-bond lengths and unit direction cosines at given positions
    /// (one entry per cation-anion bond, cation first).
    std::vector<BondGeometry> bond_geometry(const std::vector<Vec3>& positions) const;

private:
    const geometry::AtomisticStructure& s_;
    VffModel model_;
    RelaxOptions opt_;
    geometry::NeighborTable nbr_;
    std::vector<std::uint8_t> pinned_;
    // displacement added to a neighbor position to undo periodic wrapping
    Vec3 wrap_shift(std::size_t i, int b) const;
};

/// Per-region mean and standard deviation of the bond-length deviation from
/// the ideal binary bond length, written alongside relaxed positions.
void export_strain_summary(const geometry::AtomisticStructure& s,
                           const VffSystem& sys, const RelaxationResult& r,
                           const std::string& path);

} // namespace dotspin::strain
