// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <set>

#include "doctest.h"

#include "dotspin/geometry.hpp"

using namespace dotspin;
using namespace dotspin::geometry;

namespace {
constexpr double kGaAs = 0.565325;  // nm

DotGeometry paper_dot(double d, double h) {
    DotGeometry g;
    g.diameter_nm = d;
    g.height_nm = h;
    g.margin_lateral_nm = 3.0;
    g.margin_below_nm = 2.5;
    g.margin_above_nm = 2.5;
    return g;
}
} // namespace

TEST_CASE("lens signed distance basics") {
    const DotGeometry g = paper_dot(15, 6);
    const DisorderSpec iface{DisorderSpec::Mode::interface, 0.0, 1.25};

    // lens center is inside
    CHECK(classify_position(g, iface, g.center()) == Region::dot);
    // 2t above the apex is buffer
    CHECK(classify_position(g, iface, {0, 0, 6.0 + 2.5}) == Region::buffer);
    // a point on the cap surface classifies interface when t > 0
    CHECK(lens_signed_distance(g, {0, 0, 6.0}) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(classify_position(g, iface, {0, 0, 6.0}) == Region::interface);
    // just outside the rim, still within the shell
    CHECK(classify_position(g, iface, {0, 0, 6.0 + 1.2}) == Region::interface);
    // without disorder the same surface point is buffer
    const DisorderSpec none{};
    CHECK(classify_position(g, none, {0, 0, 6.0}) == Region::buffer);
}

TEST_CASE("dot nucleus counts match the lens volume") {
    // base dot ~30000, and the smaller/larger variants bracket it
    const std::size_t n15 =
        build_structure(paper_dot(15, 6), {}, 1, kGaAs).count_region(Region::dot);
    CHECK(n15 > 30000 * 0.85);
    CHECK(n15 < 30000 * 1.15);

    const std::size_t n14 =
        build_structure(paper_dot(14, 5.5), {}, 1, kGaAs).count_region(Region::dot);
    const std::size_t n16 =
        build_structure(paper_dot(16, 6.5), {}, 1, kGaAs).count_region(Region::dot);
    CHECK(n14 > 22304 * 0.8);
    CHECK(n14 < 22304 * 1.2);
    CHECK(n16 > 35161 * 0.8);
    CHECK(n16 < 35161 * 1.2);
    CHECK(n14 < n15);
    CHECK(n15 < n16);
}

TEST_CASE("zero-diameter dot is pure buffer") {
    DotGeometry g;
    g.diameter_nm = 0;
    g.height_nm = 0;
    g.margin_lateral_nm = 2.0;
    g.margin_below_nm = 2.0;
    g.margin_above_nm = 2.0;
    const auto s = build_structure(g, {}, 1, kGaAs);
    CHECK(s.count_region(Region::dot) == 0);
    CHECK(s.count_region(Region::buffer) == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.sublattice(i) == Sublattice::cation) CHECK(s.species(i) == "Ga");
    }
}

TEST_CASE("site density is 8 atoms per conventional cell") {
    DotGeometry g;
    g.diameter_nm = 0;
    g.height_nm = 0;
    g.margin_lateral_nm = 4.0;
    g.margin_below_nm = 4.0;
    g.margin_above_nm = 4.0;
    const auto s = build_structure(g, {}, 1, kGaAs);
    const double v = 8.0 * 8.0 * 8.0;  // box volume, nm^3
    const double cells = v / (kGaAs * kGaAs * kGaAs);
    CHECK(static_cast<double>(s.size()) == doctest::Approx(8.0 * cells).epsilon(0.06));
}

TEST_CASE("zincblende bonding: every interior bond joins the two sublattices") {
    const auto s = build_structure(paper_dot(8, 3.5), {}, 3, kGaAs);
    const auto nbr = build_neighbors(s);
    std::size_t interior = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        int present = 0;
        for (int b = 0; b < 4; ++b) {
            const auto j = nbr.neighbors[i][b];
            if (j < 0) continue;
            ++present;
            CHECK(s.sublattice(i) != s.sublattice(static_cast<std::size_t>(j)));
        }
        if (present == 4) ++interior;
    }
    // interior sites dominate
    CHECK(interior > s.size() * 0.8);
}

TEST_CASE("alloy occupancy is Bernoulli in x") {
    DotGeometry g = paper_dot(10, 4);
    DisorderSpec d;
    d.mode = DisorderSpec::Mode::alloy;

    SUBCASE("x = 0 leaves the dot pure InAs") {
        d.alloy_fraction = 0.0;
        const auto s = build_structure(g, d, 5, kGaAs);
        const auto s0 = build_structure(g, {}, 5, kGaAs);
        REQUIRE(s.size() == s0.size());
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.species(i) == s0.species(i));
    }
    SUBCASE("x = 1 replaces every dot cation with Ga") {
        d.alloy_fraction = 1.0;
        const auto s = build_structure(g, d, 5, kGaAs);
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s.region[i] == Region::dot && s.sublattice(i) == Sublattice::cation) {
                CHECK(s.species(i) == "Ga");
            }
        }
    }
    SUBCASE("x = 0.3 fraction within 3 sigma") {
        d.alloy_fraction = 0.3;
        const auto s = build_structure(g, d, 5, kGaAs);
        std::size_t cat = 0, ga = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s.region[i] == Region::dot && s.sublattice(i) == Sublattice::cation) {
                ++cat;
                if (s.species(i) == "Ga") ++ga;
            }
        }
        const double mean = 0.3 * static_cast<double>(cat);
        const double sigma = std::sqrt(0.3 * 0.7 * static_cast<double>(cat));
        CHECK(std::abs(static_cast<double>(ga) - mean) < 3.0 * sigma);
    }
}

TEST_CASE("interface disorder randomizes only the shell") {
    DotGeometry g = paper_dot(10, 4);
    DisorderSpec d;
    d.mode = DisorderSpec::Mode::interface;
    d.interface_thickness_nm = 1.25;
    const auto s = build_structure(g, d, 7, kGaAs);
    std::size_t shell_in = 0, shell_ga = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.sublattice(i) != Sublattice::cation) {
            CHECK(s.species(i) == "As");
            continue;
        }
        if (s.region[i] == Region::dot) CHECK(s.species(i) == "In");
        if (s.region[i] == Region::buffer) CHECK(s.species(i) == "Ga");
        if (s.region[i] == Region::interface) {
            if (s.species(i) == "In") ++shell_in;
            else ++shell_ga;
        }
    }
    const double tot = static_cast<double>(shell_in + shell_ga);
    REQUIRE(tot > 100);
    CHECK(std::abs(shell_in / tot - 0.5) < 3.0 * std::sqrt(0.25 / tot));
}

TEST_CASE("determinism and ensemble independence") {
    DotGeometry g = paper_dot(8, 3.5);
    DisorderSpec d;
    d.mode = DisorderSpec::Mode::alloy;
    d.alloy_fraction = 0.5;

    const auto a = build_structure(g, d, 42, kGaAs);
    const auto b = build_structure(g, d, 42, kGaAs);
    REQUIRE(a.size() == b.size());
    CHECK(a.species_index == b.species_index);

    // ensemble members with different indexes differ; cation overlap ~ 50%
    std::vector<AtomisticStructure> members;
    ensemble({g}, d, 3, 99, kGaAs,
             [&](std::size_t, const AtomisticStructure& s) { members.push_back(s); });
    REQUIRE(members.size() == 3);
    std::size_t agree = 0, cat = 0;
    for (std::size_t i = 0; i < members[0].size(); ++i) {
        if (members[0].region[i] != Region::dot) continue;
        if (members[0].sublattice(i) != Sublattice::cation) continue;
        ++cat;
        if (members[0].species_index[i] == members[1].species_index[i]) ++agree;
    }
    const double frac = static_cast<double>(agree) / static_cast<double>(cat);
    CHECK(std::abs(frac - 0.5) < 3.0 * std::sqrt(0.25 / static_cast<double>(cat)));

    // reproducible from (base_seed, index) alone
    std::vector<AtomisticStructure> again;
    ensemble({g}, d, 3, 99, kGaAs,
             [&](std::size_t, const AtomisticStructure& s) { again.push_back(s); });
    CHECK(members[2].species_index == again[2].species_index);
}

TEST_CASE("classify_region agrees with the analytic lens equation") {
    DotGeometry g = paper_dot(10, 4);
    DisorderSpec d;
    d.mode = DisorderSpec::Mode::interface;
    d.interface_thickness_nm = 1.0;
    const auto s = build_structure(g, d, 1, kGaAs);
    for (std::size_t i = 0; i < s.size(); i += 97) {
        CHECK(classify_region(s, i) == s.region[i]);
    }
}

TEST_CASE("structure export round trip is bit exact") {
    DotGeometry g = paper_dot(6, 2.5);
    DisorderSpec d;
    d.mode = DisorderSpec::Mode::interface;
    const auto s = build_structure(g, d, 11, kGaAs);
    export_structure(s, "geom_rt.tsv", "geom_rt.meta.json");
    const auto t = import_structure("geom_rt.tsv", "geom_rt.meta.json");
    REQUIRE(t.size() == s.size());
    CHECK(t.coords == s.coords);
    CHECK(t.species_index == s.species_index);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(t.region[i] == s.region[i]);
        CHECK(t.position(i).x == s.position(i).x);
        CHECK(t.position(i).z == s.position(i).z);
    }
    std::remove("geom_rt.tsv");
    std::remove("geom_rt.meta.json");
}

TEST_CASE("buffer too small is rejected") {
    DotGeometry g;
    g.diameter_nm = 10;
    g.height_nm = 4;
    g.margin_lateral_nm = 2.0;
    g.margin_below_nm = 0.0;
    g.margin_above_nm = 2.0;
    CHECK_THROWS_AS(build_structure(g, {}, 1, kGaAs), InputError);
}

TEST_CASE("height must not exceed diameter") {
    DotGeometry g;
    g.diameter_nm = 4;
    g.height_nm = 5;
    CHECK_THROWS_AS(g.validate(), InputError);
}
