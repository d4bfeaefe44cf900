// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dotspin/common.hpp"

namespace dotspin::geometry {

/// Lens-shaped dot: spherical cap of base diameter D and height h, base in
/// the z = 0 plane and centered on the z axis, embedded in a buffer box.
struct DotGeometry {
    double diameter_nm = 15.0;
    double height_nm = 6.0;
    std::string dot_material = "InAs";
    std::string buffer_material = "GaAs";
    double margin_lateral_nm = 12.0;
    double margin_below_nm = 10.0;
    double margin_above_nm = 10.0;

    void validate() const;

    /// Center of the lens: on the axis at half height.
    Vec3 center() const { return {0.0, 0.0, 0.5 * height_nm}; }
};

struct DisorderSpec {
    enum class Mode { none, alloy, interface };
    Mode mode = Mode::none;
    double alloy_fraction = 0.0;        // x in In(1-x)Ga(x)As, P(cation -> Ga)
    double interface_thickness_nm = 1.25;

    void validate() const;
};

enum class Sublattice : std::uint8_t { cation = 0, anion = 1 };
enum class Region : std::uint8_t { dot = 0, interface = 1, buffer = 2 };

const char* to_string(Region r);
const char* to_string(Sublattice s);

/// Signed distance to the lens surface, negative inside.  Exact for the cap
/// and base faces; near the base rim the max() composition underestimates
/// the outside distance slightly.
double lens_signed_distance(const DotGeometry& g, const Vec3& p);

/// dot strictly inside the lens; interface = shell of thickness t outside
/// the surface (t > 0); buffer otherwise.
Region classify_position(const DotGeometry& g, const DisorderSpec& d, const Vec3& p);

class AtomisticStructure {
public:
    DotGeometry geometry;
    DisorderSpec disorder;
    std::uint64_t seed = 0;
    double grid_constant_nm = 0.0;  // substrate-registered lattice constant
    // nonzero for periodic bulk cells: integer span (units of a/4) per axis
    std::array<std::int32_t, 3> periodic_span = {0, 0, 0};

    // One entry per site.  Integer coordinates are in units of a/4, which
    // makes sublattice membership and neighbor lookup exact.
    std::vector<std::array<std::int32_t, 3>> coords;
    std::vector<std::uint8_t> species_index;
    std::vector<Region> region;
    std::vector<std::string> species_names;

    std::size_t size() const { return coords.size(); }

    Vec3 position(std::size_t i) const {
        const double s = grid_constant_nm / 4.0;
        return {coords[i][0] * s, coords[i][1] * s, coords[i][2] * s};
    }

    Sublattice sublattice(std::size_t i) const {
        // cations sit on even coordinates, anions on odd
        return (coords[i][0] & 1) ? Sublattice::anion : Sublattice::cation;
    }

    const std::string& species(std::size_t i) const {
        return species_names[species_index[i]];
    }

    std::size_t count_region(Region r) const;
    std::size_t count_species(const std::string& name) const;
};

/// Deterministic for a fixed seed; cation occupancy keyed on site coordinates
/// so realizations are independent of traversal order.
AtomisticStructure build_structure(const DotGeometry& geometry,
                                   const DisorderSpec& disorder,
                                   std::uint64_t seed,
                                   double grid_constant_nm);

Region classify_region(const AtomisticStructure& s, std::size_t site);

/// n independent realizations per geometry; realization i of the flattened
/// stream uses the child seed derive(base_seed, i).
void ensemble(const std::vector<DotGeometry>& geometries,
              const DisorderSpec& disorder, std::size_t n,
              std::uint64_t base_seed, double grid_constant_nm,
              const std::function<void(std::size_t, const AtomisticStructure&)>& sink);

/// Periodic bulk cell of nx*ny*nz conventional cells on a given grid
/// constant (which may differ from the material's own, e.g. InAs strained
/// to the GaAs grid).  All sites are tagged buffer.
AtomisticStructure build_bulk(const std::string& material, int nx, int ny, int nz,
                              double grid_constant_nm);

/// Four nearest neighbors per site; -1 where the bond leaves the box.
/// For periodic structures bonds wrap, and `wrap` records the integer
/// lattice offset (units of a/4) added to the neighbor position.
struct NeighborTable {
    std::vector<std::array<std::int32_t, 4>> neighbors;
    std::vector<std::array<std::array<std::int32_t, 3>, 4>> wrap;
    bool periodic = false;
};

NeighborTable build_neighbors(const AtomisticStructure& s);

/// Columnar text export plus JSON metadata sidecar; import reproduces the
/// structure bit-exactly.
void export_structure(const AtomisticStructure& s, const std::string& table_path,
                      const std::string& meta_path);
AtomisticStructure import_structure(const std::string& table_path,
                                    const std::string& meta_path);

} // namespace dotspin::geometry
