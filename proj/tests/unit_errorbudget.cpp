// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"

#include "dotspin/errorbudget.hpp"
#include "dotspin/rng.hpp"

using namespace dotspin;
using namespace dotspin::errorbudget;

namespace {
const physcore::PhysicalConstants kC{};
}

TEST_CASE("swap error arithmetic") {
    CHECK(swap_error(1e-6, 1e-4) == doctest::Approx(1e-4).epsilon(1e-14));
    CHECK(swap_error(0.0, 1e-4) == 0.0);
    CHECK(swap_error(2e-3, 2e-3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(swap_error(1e-6, 0.0), InputError);
}

TEST_CASE("leakage arithmetic") {
    CHECK(leakage(1e-3, 0.1) == doctest::Approx(1e-4).epsilon(1e-14));
    CHECK(leakage(0.0, 0.1) == 0.0);
    CHECK(leakage(0.05, 0.05) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(leakage(1e-3, 0.0), InputError);
}

TEST_CASE("exchange window") {
    const auto w = j_window(1e-6, 0.1, 1e-4);
    CHECK_FALSE(w.empty);
    CHECK(w.j_min_eV == doctest::Approx(1e-4).epsilon(1e-14));
    CHECK(w.j_max_eV == doctest::Approx(1e-3).epsilon(1e-14));

    // collapses to a point when dE_Z = dE_e * eps
    const auto w2 = j_window(0.1 * 1e-4, 0.1, 1e-4);
    CHECK(w2.j_min_eV == doctest::Approx(w2.j_max_eV).epsilon(1e-12));
    CHECK_FALSE(w2.empty);

    const auto w3 = j_window(0.1 * 2e-4, 0.1, 1e-4);
    CHECK(w3.empty);
}

TEST_CASE("window consistency: inside passes, outside fails") {
    rng::Counter r(11, 0);
    for (int k = 0; k < 100; ++k) {
        const double dez = 1e-7 * (1.0 + 99.0 * r.next_double());
        const double dee = 0.01 * (1.0 + 99.0 * r.next_double());
        const double eps = 1e-5 * (1.0 + 99.0 * r.next_double());
        const auto w = j_window(dez, dee, eps);
        if (w.empty) continue;
        for (double f : {0.0, 0.5, 1.0}) {
            const double j = w.j_min_eV + f * (w.j_max_eV - w.j_min_eV);
            CHECK(swap_error(dez, j) <= eps * (1 + 1e-12));
            CHECK(leakage(j, dee) <= eps * (1 + 1e-12));
        }
        CHECK(swap_error(dez, w.j_min_eV * 0.99) > eps);
        CHECK(leakage(w.j_max_eV * 1.01, dee) > eps);
    }
}

TEST_CASE("scale invariance of swap error and leakage") {
    rng::Counter r(13, 0);
    for (int k = 0; k < 100; ++k) {
        const double a = 1e-6 * (1.0 + r.next_double());
        const double b = 1e-4 * (1.0 + r.next_double());
        const double c = 1.0 + 1e3 * r.next_double();
        CHECK(swap_error(c * a, c * b) == doctest::Approx(swap_error(a, b)).epsilon(1e-12));
        CHECK(leakage(c * a, c * b) == doctest::Approx(leakage(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("precession energy") {
    CHECK(precession_energy_eV(0, 0, 0, 2.0, kC) == 0.0);
    // B_perp = 0 reduces to g mu_B (B0 + B_par)
    const double e1 = precession_energy_eV(1.0, 0.02, 0.0, 2.0, kC);
    CHECK(e1 == doctest::Approx(2.0 * kC.bohr_magneton_eV_per_T() * 1.02).epsilon(1e-14));
    // hand value: 2 * 5.7884e-5 * sqrt(1.01^2 + 0.01^2)
    const double e2 = precession_energy_eV(1.0, 0.01, 0.01, 2.0, kC);
    CHECK(e2 == doctest::Approx(1.169e-4).epsilon(2e-3));
}

TEST_CASE("detuning error") {
    const double om = precession_energy_eV(1.0, 0, 0.01, 2.0, kC);
    CHECK(detuning_error(om, om, 1e-3, 2.0, kC) == 0.0);

    // drift of g mu_B * 1e-5 T against B_ac = 1e-3 T gives 1e-4
    const double drift = 2.0 * kC.bohr_magneton_eV_per_T() * 1e-5;
    CHECK(detuning_error(om + drift, om, 1e-3, 2.0, kC) ==
          doctest::Approx(1e-4).epsilon(1e-12));

    // detuning equal to g mu_B B_ac gives 1
    const double full = 2.0 * kC.bohr_magneton_eV_per_T() * 1e-3;
    CHECK(detuning_error(om + full, om, 1e-3, 2.0, kC) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // symmetric in the two frequencies
    CHECK(detuning_error(om + drift, om, 1e-3, 2.0, kC) ==
          doctest::Approx(detuning_error(om, om + drift, 1e-3, 2.0, kC)));
    CHECK_THROWS_AS(detuning_error(om, om, 0.0, 2.0, kC), InputError);
}

TEST_CASE("drift tolerances") {
    const auto t = drift_tolerances(1.0, 1e-3, 0.01, 1e-4);
    CHECK(t.parallel_max_T == doctest::Approx(1e-5).epsilon(1e-14));
    CHECK(t.perp_max_T == doctest::Approx(1e-3).epsilon(1e-14));
    CHECK_FALSE(t.linearization_warning);

    // threshold -> 1 gives B_ac and B_ac B0 / B_perp
    const auto t1 = drift_tolerances(1.0, 1e-3, 0.01, 1.0 - 1e-15);
    CHECK(t1.parallel_max_T == doctest::Approx(1e-3).epsilon(1e-7));
    CHECK(t1.perp_max_T == doctest::Approx(0.1).epsilon(1e-7));

    // perpendicular field zero: unbounded perpendicular drift
    const auto t2 = drift_tolerances(1.0, 1e-3, 0.0, 1e-4);
    CHECK(std::isinf(t2.perp_max_T));
    CHECK(t2.parallel_max_T == doctest::Approx(1e-5).epsilon(1e-14));

    const auto t3 = drift_tolerances(0.05, 1e-3, 0.01, 1e-4);
    CHECK(t3.linearization_warning);
}

TEST_CASE("drift tolerance closes the loop through the detuning error") {
    rng::Counter r(17, 0);
    for (int k = 0; k < 50; ++k) {
        const double b0 = 0.5 + 2.0 * r.next_double();
        const double bac = 1e-4 * (1.0 + 9.0 * r.next_double());
        const double bperp = 1e-3 * (1.0 + 9.0 * r.next_double());
        const double eps = 1e-5 * (1.0 + 99.0 * r.next_double());
        const auto t = drift_tolerances(b0, bac, bperp, eps);
        // linearized detuning from the parallel drift alone
        const double om_shift = 2.0 * kC.bohr_magneton_eV_per_T() * t.parallel_max_T;
        const double err = detuning_error(om_shift, 0.0, bac, 2.0, kC);
        CHECK(err == doctest::Approx(eps).epsilon(1e-10));
        // and from the perpendicular drift alone
        const double om_shift2 = 2.0 * kC.bohr_magneton_eV_per_T() *
                                 (bperp / b0) * t.perp_max_T;
        const double err2 = detuning_error(om_shift2, 0.0, bac, 2.0, kC);
        CHECK(err2 == doctest::Approx(eps).epsilon(1e-10));
    }
}

TEST_CASE("budget evaluation") {
    OperationParams p;
    p.exchange_J_eV = 5e-4;
    p.orbital_spacing_eV = 0.05;
    p.zeeman_spread_eV = 1e-6;
    const auto b = evaluate(p, kC);
    CHECK(b.swap_ok);
    CHECK(b.leakage_ok);
    CHECK(b.window_ok);
    CHECK(b.swap_error_value == doctest::Approx(4e-6));
    CHECK(b.detuning_error_value == doctest::Approx(1e-4).epsilon(1e-9));
}
