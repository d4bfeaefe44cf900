// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include "dotspin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "json.hpp"

#include "dotspin/rng.hpp"

namespace dotspin::geometry {

using nlohmann::json;

void DotGeometry::validate() const {
    if (diameter_nm < 0 || height_nm < 0) {
        throw InputError("dot geometry: diameter and height must be non-negative");
    }
    if (height_nm > diameter_nm) {
        throw InputError("dot geometry: height exceeds base diameter");
    }
    if (margin_lateral_nm < 0 || margin_below_nm < 0 || margin_above_nm < 0) {
        throw InputError("dot geometry: buffer margins must be non-negative");
    }
    if (margin_lateral_nm == 0 && diameter_nm > 0) {
        throw InputError("dot geometry: buffer box must contain the lens plus a margin");
    }
}

void DisorderSpec::validate() const {
    if (alloy_fraction < 0 || alloy_fraction > 1) {
        throw InputError("disorder: alloy fraction outside [0,1]");
    }
    if (interface_thickness_nm < 0) {
        throw InputError("disorder: interface thickness must be non-negative");
    }
}

const char* to_string(Region r) {
    switch (r) {
        case Region::dot: return "dot";
        case Region::interface: return "interface";
        case Region::buffer: return "buffer";
    }
    return "?";
}

const char* to_string(Sublattice s) {
    return s == Sublattice::cation ? "cation" : "anion";
}

double lens_signed_distance(const DotGeometry& g, const Vec3& p) {
    const double r = 0.5 * g.diameter_nm;
    const double h = g.height_nm;
    if (r <= 0.0 || h <= 0.0) return std::numeric_limits<double>::infinity();
    const double cap_radius = (r * r + h * h) / (2.0 * h);
    const double zc = h - cap_radius;  // sphere center on the axis
    const double dx = p.x, dy = p.y, dz = p.z - zc;
    const double d_sphere = std::sqrt(dx * dx + dy * dy + dz * dz) - cap_radius;
    const double d_base = -p.z;
    return std::max(d_sphere, d_base);
}

Region classify_position(const DotGeometry& g, const DisorderSpec& d, const Vec3& p) {
    const double dist = lens_signed_distance(g, p);
    if (dist < 0.0) return Region::dot;
    const double t = d.mode == DisorderSpec::Mode::interface ? d.interface_thickness_nm : 0.0;
    if (t > 0.0 && dist <= t) return Region::interface;
    return Region::buffer;
}

std::size_t AtomisticStructure::count_region(Region r) const {
    return static_cast<std::size_t>(std::count(region.begin(), region.end(), r));
}

std::size_t AtomisticStructure::count_species(const std::string& name) const {
    std::size_t idx = species_names.size();
    for (std::size_t i = 0; i < species_names.size(); ++i) {
        if (species_names[i] == name) { idx = i; break; }
    }
    if (idx == species_names.size()) return 0;
    return static_cast<std::size_t>(
        std::count(species_index.begin(), species_index.end(), static_cast<std::uint8_t>(idx)));
}

namespace {

std::uint64_t site_key(std::int32_t i, std::int32_t j, std::int32_t k) {
    const std::uint64_t ui = static_cast<std::uint32_t>(i + (1 << 20));
    const std::uint64_t uj = static_cast<std::uint32_t>(j + (1 << 20));
    const std::uint64_t uk = static_cast<std::uint32_t>(k + (1 << 20));
    return (ui << 42) | (uj << 21) | uk;
}

/// Cation/anion split of "AB" compound names like "InAs".
std::pair<std::string, std::string> split_binary(const std::string& name) {
    for (std::size_t cut = 1; cut + 1 <= name.size(); ++cut) {
        if (cut < name.size() && std::isupper(static_cast<unsigned char>(name[cut]))) {
            return {name.substr(0, cut), name.substr(cut)};
        }
    }
    throw InputError("cannot split compound name '" + name + "'");
}

} // namespace

AtomisticStructure build_structure(const DotGeometry& geometry,
                                   const DisorderSpec& disorder,
                                   std::uint64_t seed,
                                   double grid_constant_nm) {
    geometry.validate();
    disorder.validate();
    if (grid_constant_nm <= 0) throw InputError("grid constant must be positive");

    const auto [dot_cation, dot_anion] = split_binary(geometry.dot_material);
    const auto [buf_cation, buf_anion] = split_binary(geometry.buffer_material);
    if (dot_anion != buf_anion) {
        throw InputError("dot and buffer must share the anion species");
    }

    AtomisticStructure s;
    s.geometry = geometry;
    s.disorder = disorder;
    s.seed = seed;
    s.grid_constant_nm = grid_constant_nm;
    // fixed order: buffer cation, dot cation, anion
    s.species_names = {buf_cation, dot_cation, dot_anion};
    const std::uint8_t kBufCat = 0, kDotCat = 1, kAnion = 2;

    const double q = grid_constant_nm / 4.0;  // integer-unit length
    const double r = 0.5 * geometry.diameter_nm;
    const double lx = r + geometry.margin_lateral_nm;
    const double z_lo = -geometry.margin_below_nm;
    const double z_hi = geometry.height_nm + geometry.margin_above_nm;

    const auto lo_i = static_cast<std::int32_t>(std::ceil(-lx / q));
    const auto hi_i = static_cast<std::int32_t>(std::floor(lx / q));
    const auto lo_k = static_cast<std::int32_t>(std::ceil(z_lo / q));
    const auto hi_k = static_cast<std::int32_t>(std::floor(z_hi / q));

    if (geometry.diameter_nm > 0 && geometry.height_nm > 0 &&
        (lx <= r || z_hi <= geometry.height_nm || z_lo >= 0.0)) {
        throw InputError("buffer box too small to strictly contain the lens");
    }

    // z-major enumeration; within a (j,k) column sites are ordered in i
    for (std::int32_t k = lo_k; k <= hi_k; ++k) {
        for (std::int32_t j = lo_i; j <= hi_i; ++j) {
            for (std::int32_t i = lo_i; i <= hi_i; ++i) {
                const bool even = ((i | j | k) & 1) == 0;
                std::int32_t rem = (i + j + k) & 3;
                bool cation = false, anion = false;
                if (even && rem == 0) cation = true;
                else if (!even && ((i & 1) && (j & 1) && (k & 1)) && rem == 3) anion = true;
                if (!cation && !anion) continue;

                const Vec3 p{i * q, j * q, k * q};
                const Region reg = classify_position(geometry, disorder, p);

                std::uint8_t sp;
                if (anion) {
                    sp = kAnion;
                } else if (reg == Region::dot) {
                    if (disorder.mode == DisorderSpec::Mode::alloy) {
                        rng::Counter c(seed, site_key(i, j, k));
                        sp = c.next_double() < disorder.alloy_fraction ? kBufCat : kDotCat;
                    } else {
                        sp = kDotCat;
                    }
                } else if (reg == Region::interface) {
                    rng::Counter c(seed, site_key(i, j, k));
                    sp = c.next_double() < 0.5 ? kDotCat : kBufCat;
                } else {
                    sp = kBufCat;
                }

                s.coords.push_back({i, j, k});
                s.species_index.push_back(sp);
                s.region.push_back(reg);
            }
        }
    }
    return s;
}

Region classify_region(const AtomisticStructure& s, std::size_t site) {
    if (site >= s.size()) throw InputError("site index out of range");
    return classify_position(s.geometry, s.disorder, s.position(site));
}

void ensemble(const std::vector<DotGeometry>& geometries,
              const DisorderSpec& disorder, std::size_t n,
              std::uint64_t base_seed, double grid_constant_nm,
              const std::function<void(std::size_t, const AtomisticStructure&)>& sink) {
    if (n < 1) throw InputError("ensemble size must be at least 1");
    std::size_t index = 0;
    for (const auto& g : geometries) {
        for (std::size_t i = 0; i < n; ++i, ++index) {
            sink(index, build_structure(g, disorder, rng::derive(base_seed, index),
                                        grid_constant_nm));
        }
    }
}

AtomisticStructure build_bulk(const std::string& material, int nx, int ny, int nz,
                              double grid_constant_nm) {
    if (nx < 1 || ny < 1 || nz < 1) throw InputError("bulk cell counts must be positive");
    const auto [cation, anion] = split_binary(material);

    AtomisticStructure s;
    s.geometry.diameter_nm = 0.0;
    s.geometry.height_nm = 0.0;
    s.geometry.dot_material = material;
    s.geometry.buffer_material = material;
    s.grid_constant_nm = grid_constant_nm;
    s.periodic_span = {4 * nx, 4 * ny, 4 * nz};
    s.species_names = {cation, anion};

    for (std::int32_t k = 0; k < 4 * nz; ++k) {
        for (std::int32_t j = 0; j < 4 * ny; ++j) {
            for (std::int32_t i = 0; i < 4 * nx; ++i) {
                const bool even = ((i | j | k) & 1) == 0;
                const std::int32_t rem = (i + j + k) & 3;
                std::uint8_t sp;
                if (even && rem == 0) sp = 0;
                else if (((i & j & k) & 1) && rem == 3) sp = 1;
                else continue;
                s.coords.push_back({i, j, k});
                s.species_index.push_back(sp);
                s.region.push_back(Region::buffer);
            }
        }
    }
    return s;
}

NeighborTable build_neighbors(const AtomisticStructure& s) {
    std::unordered_map<std::uint64_t, std::int32_t> lookup;
    lookup.reserve(s.size() * 2);
    for (std::size_t i = 0; i < s.size(); ++i) {
        lookup.emplace(site_key(s.coords[i][0], s.coords[i][1], s.coords[i][2]),
                       static_cast<std::int32_t>(i));
    }

    static constexpr std::int32_t kBond[4][3] = {
        {1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};

    const bool periodic = s.periodic_span[0] > 0;

    NeighborTable t;
    t.periodic = periodic;
    t.neighbors.assign(s.size(), {-1, -1, -1, -1});
    t.wrap.assign(s.size(), {});
    for (std::size_t i = 0; i < s.size(); ++i) {
        const int sgn = s.sublattice(i) == Sublattice::cation ? 1 : -1;
        for (int b = 0; b < 4; ++b) {
            std::int32_t c[3];
            std::array<std::int32_t, 3> w = {0, 0, 0};
            for (int d = 0; d < 3; ++d) {
                c[d] = s.coords[i][d] + sgn * kBond[b][d];
                if (periodic) {
                    const std::int32_t span = s.periodic_span[d];
                    if (c[d] < 0) { c[d] += span; w[d] = -span; }
                    else if (c[d] >= span) { c[d] -= span; w[d] = span; }
                }
            }
            const auto it = lookup.find(site_key(c[0], c[1], c[2]));
            if (it != lookup.end()) {
                t.neighbors[i][b] = it->second;
                t.wrap[i][b] = w;
            }
        }
    }
    return t;
}

void export_structure(const AtomisticStructure& s, const std::string& table_path,
                      const std::string& meta_path) {
    std::FILE* f = std::fopen(table_path.c_str(), "w");
    if (!f) throw InputError("cannot open for writing: " + table_path);
    std::fprintf(f, "# index element x_nm y_nm z_nm sublattice region\n");
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Vec3 p = s.position(i);
        std::fprintf(f, "%zu %s %.17g %.17g %.17g %s %s\n", i, s.species(i).c_str(),
                     p.x, p.y, p.z, to_string(s.sublattice(i)),
                     to_string(s.region[i]));
    }
    std::fclose(f);

    json meta;
    meta["geometry"] = {{"diameter_nm", s.geometry.diameter_nm},
                        {"height_nm", s.geometry.height_nm},
                        {"dot_material", s.geometry.dot_material},
                        {"buffer_material", s.geometry.buffer_material},
                        {"margin_lateral_nm", s.geometry.margin_lateral_nm},
                        {"margin_below_nm", s.geometry.margin_below_nm},
                        {"margin_above_nm", s.geometry.margin_above_nm}};
    meta["disorder"] = {
        {"mode", s.disorder.mode == DisorderSpec::Mode::none
                     ? "none"
                     : (s.disorder.mode == DisorderSpec::Mode::alloy ? "alloy" : "interface")},
        {"alloy_fraction", s.disorder.alloy_fraction},
        {"interface_thickness_nm", s.disorder.interface_thickness_nm}};
    meta["seed"] = s.seed;
    meta["grid_constant_nm"] = s.grid_constant_nm;
    meta["site_count"] = s.size();
    meta["counts"] = {{"dot", s.count_region(Region::dot)},
                      {"interface", s.count_region(Region::interface)},
                      {"buffer", s.count_region(Region::buffer)}};
    meta["species_names"] = s.species_names;

    std::ofstream m(meta_path);
    if (!m) throw InputError("cannot open for writing: " + meta_path);
    m << meta.dump(2) << "\n";
}

AtomisticStructure import_structure(const std::string& table_path,
                                    const std::string& meta_path) {
    std::ifstream m(meta_path);
    if (!m) throw InputError("cannot open: " + meta_path);
    json meta;
    m >> meta;

    AtomisticStructure s;
    const json& g = meta.at("geometry");
    s.geometry.diameter_nm = g.at("diameter_nm").get<double>();
    s.geometry.height_nm = g.at("height_nm").get<double>();
    s.geometry.dot_material = g.at("dot_material").get<std::string>();
    s.geometry.buffer_material = g.at("buffer_material").get<std::string>();
    s.geometry.margin_lateral_nm = g.at("margin_lateral_nm").get<double>();
    s.geometry.margin_below_nm = g.at("margin_below_nm").get<double>();
    s.geometry.margin_above_nm = g.at("margin_above_nm").get<double>();
    const json& d = meta.at("disorder");
    const std::string mode = d.at("mode").get<std::string>();
    s.disorder.mode = mode == "none" ? DisorderSpec::Mode::none
                      : mode == "alloy" ? DisorderSpec::Mode::alloy
                                        : DisorderSpec::Mode::interface;
    s.disorder.alloy_fraction = d.at("alloy_fraction").get<double>();
    s.disorder.interface_thickness_nm = d.at("interface_thickness_nm").get<double>();
    s.seed = meta.at("seed").get<std::uint64_t>();
    s.grid_constant_nm = meta.at("grid_constant_nm").get<double>();
    s.species_names = meta.at("species_names").get<std::vector<std::string>>();

    std::ifstream f(table_path);
    if (!f) throw InputError("cannot open: " + table_path);
    std::string line;
    const double q = s.grid_constant_nm / 4.0;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        char elem[16], subl[16], reg[16];
        std::size_t idx;
        double x, y, z;
        if (std::sscanf(line.c_str(), "%zu %15s %lg %lg %lg %15s %15s", &idx, elem, &x,
                        &y, &z, subl, reg) != 7) {
            throw InputError("malformed structure row: " + line);
        }
        s.coords.push_back({static_cast<std::int32_t>(std::lround(x / q)),
                            static_cast<std::int32_t>(std::lround(y / q)),
                            static_cast<std::int32_t>(std::lround(z / q))});
        std::uint8_t sp = 0;
        for (std::size_t i = 0; i < s.species_names.size(); ++i) {
            if (s.species_names[i] == elem) sp = static_cast<std::uint8_t>(i);
        }
        s.species_index.push_back(sp);
        const std::string r(reg);
        s.region.push_back(r == "dot" ? Region::dot
                           : r == "interface" ? Region::interface : Region::buffer);
    }
    return s;
}

} // namespace dotspin::geometry
