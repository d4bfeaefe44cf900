// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include "dotspin/errorbudget.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace dotspin::errorbudget {

void OperationParams::validate() const {
    if (exchange_J_eV <= 0) throw InputError("exchange energy J must be positive");
    if (orbital_spacing_eV <= 0) throw InputError("orbital spacing must be positive");
    if (static_field_T <= 0) throw InputError("static field B0 must be positive");
    if (esr_field_T <= 0) throw InputError("ESR field B_ac must be positive");
    if (threshold <= 0 || threshold >= 1) throw InputError("threshold must be in (0,1)");
}

double swap_error(double zeeman_spread_eV, double exchange_J_eV) {
    if (exchange_J_eV <= 0) throw InputError("swap_error: J must be positive");
    const double r = zeeman_spread_eV / exchange_J_eV;
    return r * r;
}

double leakage(double exchange_J_eV, double orbital_spacing_eV) {
    if (orbital_spacing_eV <= 0) throw InputError("leakage: delta E_e must be positive");
    const double r = exchange_J_eV / orbital_spacing_eV;
    return r * r;
}

JWindow j_window(double zeeman_spread_eV, double orbital_spacing_eV, double threshold) {
    if (threshold <= 0) throw InputError("j_window: threshold must be positive");
    JWindow w;
    const double rt = std::sqrt(threshold);
    w.j_min_eV = zeeman_spread_eV / rt;
    w.j_max_eV = orbital_spacing_eV * rt;
    w.empty = w.j_min_eV > w.j_max_eV;
    return w;
}

double precession_energy_eV(double b0_T, double b_par_T, double b_perp_T, double g_e,
                            const physcore::PhysicalConstants& c) {
    const double btot = std::sqrt((b0_T + b_par_T) * (b0_T + b_par_T) +
                                  b_perp_T * b_perp_T);
    return std::abs(g_e) * c.bohr_magneton_eV_per_T() * btot;
}

double detuning_error(double omega_ac_eV, double omega_e_eV, double b_ac_T, double g_e,
                      const physcore::PhysicalConstants& c) {
    if (b_ac_T <= 0) throw InputError("detuning_error: B_ac must be positive");
    const double denom = std::abs(g_e) * c.bohr_magneton_eV_per_T() * b_ac_T;
    const double r = (omega_ac_eV - omega_e_eV) / denom;
    return r * r;
}

DriftTolerances drift_tolerances(double b0_T, double b_ac_T, double b_perp_T,
                                 double threshold) {
    if (b_ac_T <= 0) throw InputError("drift_tolerances: B_ac must be positive");
    if (threshold <= 0) throw InputError("drift_tolerances: threshold must be positive");
    DriftTolerances t;
    const double rt = std::sqrt(threshold);
    t.parallel_max_T = rt * b_ac_T;
    t.perp_max_T = b_perp_T > 0 ? rt * b_ac_T * (b0_T / b_perp_T)
                                : std::numeric_limits<double>::infinity();
    t.linearization_warning = b_perp_T > 0 && b0_T / b_perp_T < 10.0;
    return t;
}

ErrorBudget evaluate(const OperationParams& p, const physcore::PhysicalConstants& c) {
    p.validate();
    ErrorBudget b;
    b.params = p;
    b.swap_error_value = swap_error(p.zeeman_spread_eV, p.exchange_J_eV);
    b.leakage_value = leakage(p.exchange_J_eV, p.orbital_spacing_eV);
    b.window = j_window(p.zeeman_spread_eV, p.orbital_spacing_eV, p.threshold);
    b.tolerances = drift_tolerances(p.static_field_T, p.esr_field_T, p.field_perp_T,
                                    p.threshold);

    // detuning error if the parallel field drifts by its full tolerance
    const double omega_e = precession_energy_eV(p.static_field_T, p.field_parallel_T,
                                                p.field_perp_T, p.g_electron, c);
    const double drift = std::abs(p.g_electron) * c.bohr_magneton_eV_per_T() *
                         b.tolerances.parallel_max_T;
    b.detuning_error_value =
        detuning_error(omega_e + drift, omega_e, p.esr_field_T, p.g_electron, c);

    b.swap_ok = b.swap_error_value <= p.threshold;
    b.leakage_ok = b.leakage_value <= p.threshold;
    b.window_ok = !b.window.empty;
    return b;
}

void export_budget(const ErrorBudget& b, const std::string& txt_path,
                   const std::string& json_path) {
    std::FILE* f = std::fopen(txt_path.c_str(), "w");
    if (!f) throw InputError("cannot open for writing: " + txt_path);
    std::fprintf(f, "inputs: J=%.4g eV  dE_e=%.4g eV  dE_Z=%.4g eV  B0=%.3g T  "
                    "B_ac=%.3g T  B_N_perp=%.3g T  threshold=%.1g\n",
                 b.params.exchange_J_eV, b.params.orbital_spacing_eV,
                 b.params.zeeman_spread_eV, b.params.static_field_T,
                 b.params.esr_field_T, b.params.field_perp_T, b.params.threshold);
    std::fprintf(f, "swap error      %.4g  (%s)\n", b.swap_error_value,
                 b.swap_ok ? "pass" : "FAIL");
    std::fprintf(f, "leakage         %.4g  (%s)\n", b.leakage_value,
                 b.leakage_ok ? "pass" : "FAIL");
    std::fprintf(f, "detuning error  %.4g at parallel drift limit\n",
                 b.detuning_error_value);
    if (b.window.empty) {
        std::fprintf(f, "exchange window: no admissible J\n");
    } else {
        std::fprintf(f, "exchange window [%.4g, %.4g] eV\n", b.window.j_min_eV,
                     b.window.j_max_eV);
    }
    if (std::isinf(b.tolerances.perp_max_T)) {
        std::fprintf(f, "drift limits: parallel %.4g T, perpendicular unbounded\n",
                     b.tolerances.parallel_max_T);
    } else {
        std::fprintf(f, "drift limits: parallel %.4g T, perpendicular %.4g T\n",
                     b.tolerances.parallel_max_T, b.tolerances.perp_max_T);
    }
    if (b.tolerances.linearization_warning) {
        std::fprintf(f, "warning: B0 is not large against B_N_perp; the linearized "
                        "detuning is approximate\n");
    }
    std::fclose(f);

    nlohmann::json j;
    j["inputs"] = {{"exchange_J_eV", b.params.exchange_J_eV},
                   {"orbital_spacing_eV", b.params.orbital_spacing_eV},
                   {"zeeman_spread_eV", b.params.zeeman_spread_eV},
                   {"static_field_T", b.params.static_field_T},
                   {"esr_field_T", b.params.esr_field_T},
                   {"field_parallel_T", b.params.field_parallel_T},
                   {"field_perp_T", b.params.field_perp_T},
                   {"g_electron", b.params.g_electron},
                   {"threshold", b.params.threshold}};
    j["swap_error"] = b.swap_error_value;
    j["swap_ok"] = b.swap_ok;
    j["leakage"] = b.leakage_value;
    j["leakage_ok"] = b.leakage_ok;
    j["detuning_error_at_parallel_limit"] = b.detuning_error_value;
    j["j_window_eV"] =
        b.window.empty ? nlohmann::json(nullptr)
                       : nlohmann::json::array({b.window.j_min_eV, b.window.j_max_eV});
    j["j_window_empty"] = b.window.empty;
    j["drift_parallel_max_T"] = b.tolerances.parallel_max_T;
    if (std::isinf(b.tolerances.perp_max_T)) {
        j["drift_perp_max_T"] = nullptr;
        j["drift_perp_unbounded"] = true;
    } else {
        j["drift_perp_max_T"] = b.tolerances.perp_max_T;
        j["drift_perp_unbounded"] = false;
    }
    j["linearization_warning"] = b.tolerances.linearization_warning;
    std::ofstream out(json_path);
    if (!out) throw InputError("cannot open for writing: " + json_path);
    out << j.dump(2) << "\n";
}

} // namespace dotspin::errorbudget
