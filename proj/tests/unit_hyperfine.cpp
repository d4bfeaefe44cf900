// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"

#include "dotspin/hyperfine.hpp"
#include "dotspin/rng.hpp"

using namespace dotspin;
using namespace dotspin::hyperfine;
using geometry::AtomisticStructure;

namespace {
const std::string kData = std::string(DOTSPIN_SOURCE_DIR) + "/data/";

const physcore::Database& db() {
    static const auto d = physcore::load_database(kData + "physdb.json");
    return d;
}

AtomisticStructure small_dot() {
    geometry::DotGeometry g;
    g.diameter_nm = 5.0;
    g.height_nm = 2.2;
    g.margin_lateral_nm = 1.5;
    g.margin_below_nm = 1.2;
    g.margin_above_nm = 1.2;
    return geometry::build_structure(g, {}, 3,
                                     db().material("GaAs").lattice_constant_nm);
}

/// Synthetic normalized s-only wavefunction with a gaussian envelope.
electronic::WaveFunction gaussian_wf(const AtomisticStructure& s, double width_nm) {
    electronic::WaveFunction wf;
    wf.tier = electronic::BasisTier::s_only;
    wf.amplitudes.resize(s.size());
    const Vec3 c = s.geometry.center();
    double norm = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r2 = (s.position(i) - c).norm2();
        wf.amplitudes[i] = std::exp(-r2 / (2 * width_nm * width_nm));
        norm += wf.amplitudes[i] * wf.amplitudes[i];
    }
    for (auto& a : wf.amplitudes) a /= std::sqrt(norm);
    return wf;
}
} // namespace

TEST_CASE("contact density basics") {
    const auto& in_species = db().species_in_host("In", "InAs");
    electronic::WaveFunction wf;
    wf.tier = electronic::BasisTier::sp3s;
    wf.amplitudes.assign(5, 0.0);

    SUBCASE("zero amplitudes give zero density") {
        CHECK(contact_density(wf, 0, in_species) == 0.0);
    }
    SUBCASE("pure s amplitude scales the calibrated density") {
        wf.amplitudes[0] = 0.01;
        CHECK(contact_density(wf, 0, in_species) ==
              doctest::Approx(1e-4 * in_species.density_s).epsilon(1e-12));
        // the paper's rounded table value
        CHECK(contact_density(wf, 0, in_species) ==
              doctest::Approx(7.9e21).epsilon(0.02));
    }
    SUBCASE("bulk-edge coefficients recover the measured bulk density") {
        const double w = 0.037;  // envelope weight
        wf.amplitudes[0] = 0.974 * std::sqrt(w);
        wf.amplitudes[4] = 0.228 * std::sqrt(w);
        CHECK(contact_density(wf, 0, in_species) ==
              doctest::Approx(w * 9.4e25).epsilon(0.01));
    }
}

TEST_CASE("coupling map: scale anchor, species resolution, reach") {
    const auto s = small_dot();
    auto wf = gaussian_wf(s, 1.3);
    const auto map = coupling_map(wf, s, db());
    REQUIRE(map.size() == s.size());

    // all couplings non-negative, length matches
    for (double a : map.coupling_eV) CHECK(a >= 0.0);

    // unit-system anchor: the largest coupling of a localized envelope
    // over ~1e3 nuclei lands in the neV decade range
    const double max_nev = map.max_coupling_eV() * 1e9;
    CHECK(max_nev > 0.5);
    CHECK(max_nev < 1000.0);

    // the maximum sits on an anion near the center (anion density larger)
    const auto imax = map.argmax_site();
    CHECK(s.sublattice(imax) == geometry::Sublattice::anion);
    CHECK((s.position(imax) - s.geometry.center()).norm() < 1.0);

    // anion couplings beat cation couplings on average
    const double ratio = anion_cation_ratio(map, s);
    CHECK(ratio > 1.2);
    CHECK(ratio < 2.3);

    // global phase leaves the map unchanged
    auto wf2 = wf;
    for (auto& a : wf2.amplitudes) a = -a;
    const auto map2 = coupling_map(wf2, s, db());
    for (std::size_t i = 0; i < map.size(); ++i) {
        CHECK(map2.coupling_eV[i] == doctest::Approx(map.coupling_eV[i]).epsilon(1e-14));
    }
}

TEST_CASE("density-weighted norm consistency (s-only synthetic)") {
    const auto s = small_dot();
    const auto wf = gaussian_wf(s, 1.3);
    const auto map = coupling_map(wf, s, db());
    // sum over sites of D_j / phi_s^2(species at j) recovers the s-norm = 1
    double acc = 0.0;
    const auto nbr = geometry::build_neighbors(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
        // same host resolution as the map builder
        const auto& sp = [&]() -> const physcore::NuclearSpecies& {
            if (s.sublattice(i) == geometry::Sublattice::cation) {
                return db().species_in_host(s.species(i), s.species(i) + "As");
            }
            int in_count = 0, tot = 0;
            for (int b = 0; b < 4; ++b) {
                const auto j = nbr.neighbors[i][b];
                if (j < 0) continue;
                ++tot;
                if (s.species(static_cast<std::size_t>(j)) == "In") ++in_count;
            }
            const bool in_host = 2 * in_count > tot || (2 * in_count == tot);
            return db().species_in_host("As", in_host ? "InAs" : "GaAs");
        }();
        acc += map.contact_density_cm3[i] / sp.density_s;
    }
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("monotonicity in the density at fixed species") {
    const auto& sp = db().species_in_host("As", "InAs");
    electronic::WaveFunction lo, hi;
    lo.tier = hi.tier = electronic::BasisTier::s_only;
    lo.amplitudes = {0.01};
    hi.amplitudes = {0.02};
    CHECK(contact_density(hi, 0, sp) > contact_density(lo, 0, sp));
}

TEST_CASE("reach count") {
    HyperfineMap map;
    map.coupling_eV = {1.0, 0.5, 0.1, 0.005, 0.0};
    CHECK(reach_count(map, 0.01) == 3);
    CHECK(reach_count(map, 0.999) == 1);
    // uniform map: every site clears any fraction below one
    HyperfineMap uni;
    uni.coupling_eV.assign(17, 0.4);
    CHECK(reach_count(uni, 0.01) == 17);
    CHECK(reach_count(uni, 0.99) == 17);
    HyperfineMap empty;
    CHECK_THROWS_AS(reach_count(empty, 0.01), InputError);
    CHECK_THROWS_AS(reach_count(uni, 0.0), InputError);
    CHECK_THROWS_AS(reach_count(uni, 1.0), InputError);
}

TEST_CASE("profiles along the dot axes") {
    const auto s = small_dot();
    // squeeze the envelope laterally so the z tail is fatter than the x tail
    electronic::WaveFunction wf;
    wf.tier = electronic::BasisTier::s_only;
    wf.amplitudes.resize(s.size());
    const Vec3 c = s.geometry.center();
    double norm = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Vec3 d = s.position(i) - c;
        wf.amplitudes[i] = std::exp(-(d.x * d.x + d.y * d.y) / (2 * 0.8 * 0.8) -
                                    d.z * d.z / (2 * 1.4 * 1.4));
        norm += wf.amplitudes[i] * wf.amplitudes[i];
    }
    for (auto& a : wf.amplitudes) a /= std::sqrt(norm);

    const auto map = coupling_map(wf, s, db());
    const auto px = profile(map, s, 'x', 0.0);
    const auto pz = profile(map, s, 'z', 0.0);
    CHECK(px.points.size() > 10);
    CHECK(pz.points.size() > 5);
    CHECK(px.interface_hi_nm > 0);
    CHECK(pz.interface_hi_nm == doctest::Approx(s.geometry.height_nm));

    const double lx = decay_length(px);
    const double lz = decay_length(pz);
    CHECK(lx > 0);
    CHECK(lz > lx);

    // binned variant aggregates to fewer points
    const auto pb = profile(map, s, 'x', 1.2);
    CHECK(pb.points.size() < px.points.size());

    // profile of an all-zero map is all zeros
    HyperfineMap zero;
    zero.coupling_eV.assign(s.size(), 0.0);
    zero.contact_density_cm3.assign(s.size(), 0.0);
    const auto pz0 = profile(zero, s, 'x', 0.0);
    for (const auto& p : pz0.points) CHECK(p.coupling_eV == 0.0);
}
