// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>

#include "doctest.h"

#include "dotspin/physcore.hpp"
#include "dotspin/rng.hpp"

using namespace dotspin;
using namespace dotspin::physcore;

namespace {
const std::string kDbPath = std::string(DOTSPIN_SOURCE_DIR) + "/data/physdb.json";
}

TEST_CASE("constants are positive and mu_N/mu_B matches the mass ratio") {
    PhysicalConstants c;
    c.validate();
    CHECK(c.nuclear_magneton_erg_per_G / c.bohr_magneton_erg_per_G ==
          doctest::Approx(5.446e-4).epsilon(1e-4));
}

TEST_CASE("bundled database loads with In, Ga, As") {
    const auto db = load_database(kDbPath);
    CHECK(db.species("In").spin == doctest::Approx(4.5));
    CHECK(db.species("Ga").spin == doctest::Approx(1.5));
    CHECK(db.species("As").spin == doctest::Approx(1.5));
    CHECK(db.has_material("InAs"));
    CHECK(db.has_material("GaAs"));
    CHECK(db.material("GaAs").g_electron != 0.0);

    // loading twice yields identical records
    const auto db2 = load_database(kDbPath);
    for (const auto& name : db.species_names()) {
        CHECK(db.species(name).density_s == db2.species(name).density_s);
        CHECK(db.species(name).g_factor == db2.species(name).g_factor);
    }
}

TEST_CASE("empty database file is a schema error") {
    const std::string tmp = "empty_db.json";
    std::ofstream(tmp) << "{}";
    CHECK_THROWS_AS(load_database(tmp), InputError);
}

TEST_CASE("negative density is rejected with the species named") {
    const std::string tmp = "bad_db.json";
    std::ofstream(tmp) << R"({
      "schema_version": 1,
      "species": [{"name": "Xx", "spin": 0.5, "g_factor": 1.0,
                   "density_s_cm3": -1.0, "density_sstar_cm3": 0.0,
                   "orbital_ratio": 0.0}],
      "materials": []
    })";
    try {
        load_database(tmp);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("Xx") != std::string::npos);
    }
}

TEST_CASE("missing database file") {
    CHECK_THROWS_AS(load_database("no/such/file.json"), InputError);
}

TEST_CASE("appendix calibration reproduces the deduced density table") {
    // alpha, beta, r, deduced bulk density -> expected phi_s^2, phi_s*^2
    // (densities in 1e25 cm^-3)
    struct Row {
        BulkCalibrationInput in;
        double phi_s, phi_ss;
    };
    const Row rows[] = {
        {{"In", "InAs", 9.4e25, 0.974, 0.228, 0.53}, 7.9, 2.2},
        {{"As", "InAs", 9.8e25, 0.872, -0.489, 0.30}, 18.4, 1.7},
        {{"Ga", "GaAs", 5.8e25, 0.988, 0.157, 0.44}, 5.2, 1.0},
        {{"As", "GaAs", 9.8e25, 0.869, -0.576, 0.30}, 20.2, 1.8},
    };
    for (const auto& row : rows) {
        const auto out = calibrate_orbital_densities(row.in);
        // "2 significant figures": relative agreement to 5%
        CHECK(out.density_s / 1e25 == doctest::Approx(row.phi_s).epsilon(0.05));
        CHECK(out.density_sstar / 1e25 == doctest::Approx(row.phi_ss).epsilon(0.05));
        // r^2 * phi_s^2 = phi_s*^2 exactly by construction
        CHECK(out.density_sstar ==
              doctest::Approx(row.in.orbital_ratio * row.in.orbital_ratio *
                              out.density_s).epsilon(1e-12));
    }
}

TEST_CASE("calibration inputs shipped in the database reproduce the table") {
    const auto db = load_database(kDbPath);
    REQUIRE(db.calibration_inputs.size() == 4);
    const double expect_s[] = {7.9e25, 18.4e25, 5.2e25, 20.2e25};
    const double expect_ss[] = {2.2e25, 1.7e25, 1.0e25, 1.8e25};
    for (std::size_t i = 0; i < 4; ++i) {
        const auto out = calibrate_orbital_densities(db.calibration_inputs[i]);
        CHECK(out.density_s == doctest::Approx(expect_s[i]).epsilon(0.05));
        CHECK(out.density_sstar == doctest::Approx(expect_ss[i]).epsilon(0.05));
    }
}

TEST_CASE("calibrate then recompose returns the input density") {
    rng::Counter r(7, 0);
    for (int k = 0; k < 200; ++k) {
        BulkCalibrationInput in;
        in.alpha = 0.5 + r.next_double();
        in.beta = 2.0 * r.next_double() - 1.0;
        in.orbital_ratio = 2.0 * r.next_double() - 1.0;
        if (std::abs(in.alpha + in.beta * in.orbital_ratio) < 1e-3) continue;
        in.bulk_density = 1e25 * (0.1 + 10.0 * r.next_double());
        const auto out = calibrate_orbital_densities(in);
        const double phi_s = std::sqrt(out.density_s);
        const double phi_ss = (in.orbital_ratio < 0 ? -1.0 : 1.0) *
                              std::sqrt(out.density_sstar);
        const double re = in.alpha * phi_s + in.beta * phi_ss;
        CHECK(re * re == doctest::Approx(in.bulk_density).epsilon(1e-12));
    }
}

TEST_CASE("single-orbital limit: beta = 0") {
    BulkCalibrationInput in{"X", "Y", 0.81e25, 0.9, 0.0, 0.7};
    const auto out = calibrate_orbital_densities(in);
    CHECK(out.density_s == doctest::Approx(1e25).epsilon(1e-12));
}

TEST_CASE("singular calibration rejected") {
    BulkCalibrationInput in{"X", "Y", 1e25, 0.5, -1.0, 0.5};
    CHECK_THROWS_AS(calibrate_orbital_densities(in), InputError);
}

TEST_CASE("bulk density deduction") {
    CHECK(deduce_bulk_density(9.4e25, 1.0) == doctest::Approx(9.4e25));
    CHECK(deduce_bulk_density(1.6e26, 0.6125) == doctest::Approx(9.8e25));
    CHECK_THROWS_AS(deduce_bulk_density(9.4e25, 0.0), InputError);
    CHECK_THROWS_AS(deduce_bulk_density(-1.0, 1.0), InputError);
}

TEST_CASE("host-specialized species resolve, default falls back") {
    const auto db = load_database(kDbPath);
    const auto& as_inas = db.species_in_host("As", "InAs");
    const auto& as_gaas = db.species_in_host("As", "GaAs");
    CHECK(as_inas.density_s != as_gaas.density_s);
    // unknown host falls back to the element default (InAs-host record)
    const auto& fallback = db.species_in_host("As", "ZnSe");
    CHECK(fallback.density_s == db.species("As").density_s);
}
