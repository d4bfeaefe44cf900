// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include "dotspin/hyperfine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace dotspin::hyperfine {

using geometry::AtomisticStructure;
using geometry::Region;
using geometry::Sublattice;
using physcore::NuclearSpecies;

double HyperfineMap::max_coupling_eV() const {
    double m = 0.0;
    for (double a : coupling_eV) m = std::max(m, a);
    return m;
}

std::size_t HyperfineMap::argmax_site() const {
    if (coupling_eV.empty()) throw InputError("empty hyperfine map");
    return static_cast<std::size_t>(
        std::max_element(coupling_eV.begin(), coupling_eV.end()) - coupling_eV.begin());
}

double contact_density(const electronic::WaveFunction& wf, std::size_t site,
                       const NuclearSpecies& species) {
    if (species.density_s == 0.0 && species.density_sstar == 0.0) {
        throw InputError("species '" + species.name + "' has no calibrated densities");
    }
    const double phi_s = std::sqrt(species.density_s);
    const double sign = species.orbital_ratio < 0 ? -1.0 : 1.0;
    const double phi_ss = sign * std::sqrt(species.density_sstar);
    const double psi = wf.alpha(site) * phi_s + wf.beta(site) * phi_ss;
    return psi * psi;
}

HyperfineMap coupling_map(const electronic::WaveFunction& wf,
                          const AtomisticStructure& s, const physcore::Database& db,
                          const geometry::NeighborTable* nbr_in) {
    if (wf.site_count() != s.size()) {
        throw InputError("wavefunction/structure size mismatch");
    }
    const double norm = wf.norm2();
    if (std::abs(norm - 1.0) > 1e-8) {
        throw InputError("wavefunction is not normalized");
    }

    geometry::NeighborTable local;
    const geometry::NeighborTable* nbr = nbr_in;
    if (!nbr) {
        local = geometry::build_neighbors(s);
        nbr = &local;
    }

    const auto [dot_cat, anion_name] = [&]() {
        std::string c = s.species_names.size() > 1 ? s.species_names[1] : s.species_names[0];
        std::string a = s.species_names.back();
        return std::pair<std::string, std::string>(c, a);
    }();

    const double prefactor = 16.0 * M_PI / 3.0 * db.constants.bohr_magneton_erg_per_G *
                             db.constants.nuclear_magneton_erg_per_G;

    HyperfineMap map;
    map.coupling_eV.resize(s.size());
    map.contact_density_cm3.resize(s.size());

    for (std::size_t i = 0; i < s.size(); ++i) {
        const std::string& elem = s.species(i);
        const NuclearSpecies* sp = nullptr;
        if (s.sublattice(i) == Sublattice::cation) {
            sp = &db.species_in_host(elem, elem + anion_name);
        } else {
            // majority cation binary among the neighbors; ties -> dot material
            std::map<std::string, int> tally;
            for (int b = 0; b < 4; ++b) {
                const auto j = nbr->neighbors[i][b];
                if (j >= 0) tally[s.species(j)] += 1;
            }
            std::string host = s.geometry.dot_material;
            int best = -1;
            bool tie = false;
            for (const auto& [cat, cnt] : tally) {
                if (cnt > best) { best = cnt; host = cat + elem; tie = false; }
                else if (cnt == best) { tie = true; }
            }
            if (tie || best < 0) host = s.geometry.dot_material;
            sp = &db.species_in_host(elem, host);
        }
        if (sp->g_factor == 0.0) {
            throw InputError("species '" + elem + "' has no nuclear g factor");
        }
        const double d = contact_density(wf, i, *sp);
        map.contact_density_cm3[i] = d;
        map.coupling_eV[i] = prefactor * sp->g_factor * d / db.constants.erg_per_eV;
    }
    return map;
}

std::size_t reach_count(const HyperfineMap& map, double fraction) {
    if (map.size() == 0) throw InputError("empty hyperfine map");
    if (fraction <= 0.0 || fraction >= 1.0) {
        throw InputError("reach fraction must be in (0,1)");
    }
    const double cut = fraction * map.max_coupling_eV();
    return static_cast<std::size_t>(std::count_if(
        map.coupling_eV.begin(), map.coupling_eV.end(),
        [cut](double a) { return a > cut; }));
}

double anion_cation_ratio(const HyperfineMap& map, const AtomisticStructure& s,
                          double threshold_fraction) {
    const double cut = threshold_fraction * map.max_coupling_eV();
    double sum_a = 0.0, sum_c = 0.0;
    std::size_t n_a = 0, n_c = 0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (map.coupling_eV[i] <= cut) continue;
        if (s.sublattice(i) == Sublattice::anion) {
            sum_a += map.coupling_eV[i];
            ++n_a;
        } else {
            sum_c += map.coupling_eV[i];
            ++n_c;
        }
    }
    if (n_a == 0 || n_c == 0 || sum_c == 0.0) return 0.0;
    return (sum_a / n_a) / (sum_c / n_c);
}

Profile profile(const HyperfineMap& map, const AtomisticStructure& s, char axis,
                double bin_width_nm) {
    if (map.size() != s.size()) throw InputError("map/structure size mismatch");
    if (axis != 'x' && axis != 'z') throw InputError("profile axis must be 'x' or 'z'");

    const Vec3 center = s.geometry.center();
    const double half_bond = s.grid_constant_nm * std::sqrt(3.0) / 8.0;

    std::vector<ProfilePoint> pts;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Vec3 p = s.position(i);
        double lateral, coord;
        if (axis == 'x') {
            lateral = std::hypot(p.y - center.y, p.z - center.z);
            coord = p.x;
        } else {
            lateral = std::hypot(p.x, p.y);
            coord = p.z;
        }
        if (lateral <= half_bond) pts.push_back({coord, map.coupling_eV[i]});
    }
    if (pts.empty()) throw InputError("profile: no sites within half a bond of the axis");
    std::sort(pts.begin(), pts.end(), [](const ProfilePoint& a, const ProfilePoint& b) {
        return a.coordinate_nm < b.coordinate_nm;
    });

    Profile out;
    out.axis = axis;
    if (bin_width_nm > 0) {
        double lo = pts.front().coordinate_nm;
        std::size_t k = 0;
        while (k < pts.size()) {
            double acc = 0.0;
            int cnt = 0;
            double edge = lo + bin_width_nm;
            double mid = lo + 0.5 * bin_width_nm;
            while (k < pts.size() && pts[k].coordinate_nm < edge) {
                acc += pts[k].coupling_eV;
                ++cnt;
                ++k;
            }
            if (cnt > 0) out.points.push_back({mid, acc / cnt});
            lo = edge;
        }
    } else {
        out.points = std::move(pts);
    }

    // lens surface crossings along the line
    const double r = 0.5 * s.geometry.diameter_nm;
    const double h = s.geometry.height_nm;
    if (axis == 'z') {
        out.interface_lo_nm = 0.0;
        out.interface_hi_nm = h;
    } else if (r > 0 && h > 0) {
        const double cap_r = (r * r + h * h) / (2.0 * h);
        const double zc = h - cap_r;
        const double x2 = cap_r * cap_r - (center.z - zc) * (center.z - zc);
        const double x = x2 > 0 ? std::sqrt(x2) : 0.0;
        out.interface_lo_nm = -x;
        out.interface_hi_nm = x;
    }
    return out;
}

double decay_length(const Profile& p) {
    // exponential fit (log-linear least squares) outside the upper surface
    double x0 = p.interface_hi_nm;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& pt : p.points) {
        if (pt.coordinate_nm <= x0 || pt.coupling_eV <= 0) continue;
        const double x = pt.coordinate_nm - x0;
        const double y = std::log(pt.coupling_eV);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n < 2) return 0.0;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return slope < 0 ? -1.0 / slope : std::numeric_limits<double>::infinity();
}

void export_map(const HyperfineMap& map, const AtomisticStructure& s,
                const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw InputError("cannot open for writing: " + path);
    std::fprintf(f, "# site element region x_nm y_nm z_nm coupling_eV\n");
    for (std::size_t i = 0; i < map.size(); ++i) {
        const Vec3 p = s.position(i);
        std::fprintf(f, "%zu %s %s %.17g %.17g %.17g %.17g\n", i, s.species(i).c_str(),
                     geometry::to_string(s.region[i]), p.x, p.y, p.z,
                     map.coupling_eV[i]);
    }
    std::fclose(f);
}

void export_profile(const Profile& p, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw InputError("cannot open for writing: " + path);
    std::fprintf(f, "# axis %c  interface at %.17g %.17g nm\n", p.axis,
                 p.interface_lo_nm, p.interface_hi_nm);
    std::fprintf(f, "# coordinate_nm coupling_eV\n");
    for (const auto& pt : p.points) {
        std::fprintf(f, "%.17g %.17g\n", pt.coordinate_nm, pt.coupling_eV);
    }
    std::fclose(f);
}

} // namespace dotspin::hyperfine
