// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "dotspin/physcore.hpp"

namespace dotspin::errorbudget {

/// Inputs for the qubit-operation error estimates.  Energies in eV,
/// fields in Tesla; omega quantities are carried as energies (g_e mu_B B).
struct OperationParams {
    double exchange_J_eV = 1e-4;
    double orbital_spacing_eV = 0.1;
    double zeeman_spread_eV = 1e-6;    // delta E_Z between the two qubits
    double static_field_T = 1.0;       // B_0
    double esr_field_T = 1e-3;         // B_ac
    double field_parallel_T = 0.0;     // B_N component along B_0
    double field_perp_T = 0.01;        // B_N component across B_0
    double g_electron = 2.0;
    double threshold = 1e-4;           // error budget per operation

    void validate() const;
};

/// (delta E_Z / J)^2
double swap_error(double zeeman_spread_eV, double exchange_J_eV);

/// (J / delta E_e)^2
double leakage(double exchange_J_eV, double orbital_spacing_eV);

struct JWindow {
    double j_min_eV = 0.0;
    double j_max_eV = 0.0;
    bool empty = false;
};

/// [dE_Z / sqrt(eps), dE_e * sqrt(eps)], flagged empty when inverted.
JWindow j_window(double zeeman_spread_eV, double orbital_spacing_eV, double threshold);

/// Electron precession as an energy: g_e mu_B sqrt((B0+B||)^2 + Bperp^2).
double precession_energy_eV(double b0_T, double b_par_T, double b_perp_T, double g_e,
                            const physcore::PhysicalConstants& c);

/// (omega_ac - omega_e)^2 / (g_e mu_B B_ac)^2, omegas as energies.
double detuning_error(double omega_ac_eV, double omega_e_eV, double b_ac_T, double g_e,
                      const physcore::PhysicalConstants& c);

struct DriftTolerances {
    double parallel_max_T = 0.0;
    double perp_max_T = 0.0;       // infinity when B_perp = 0
    bool linearization_warning = false;  // B0 is not >> B_N_perp
};

/// Largest nuclear-field drifts keeping the detuning error at the
/// threshold, one component at a time.
DriftTolerances drift_tolerances(double b0_T, double b_ac_T, double b_perp_T,
                                 double threshold);

struct ErrorBudget {
    OperationParams params;
    double swap_error_value = 0.0;
    double leakage_value = 0.0;
    double detuning_error_value = 0.0;  // at drift = parallel tolerance
    JWindow window;
    DriftTolerances tolerances;
    bool swap_ok = false;
    bool leakage_ok = false;
    bool window_ok = false;
};

ErrorBudget evaluate(const OperationParams& p, const physcore::PhysicalConstants& c);

void export_budget(const ErrorBudget& b, const std::string& txt_path,
                   const std::string& json_path);

} // namespace dotspin::errorbudget
