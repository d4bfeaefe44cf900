// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dotspin/geometry.hpp"
#include "dotspin/hyperfine.hpp"
#include "dotspin/physcore.hpp"

namespace dotspin::spinbath {

/// Per-site nuclear spin expectation vectors.
struct NuclearSpinConfig {
    enum class Mode { unpolarized_sample, polarized };
    Mode mode = Mode::polarized;
    std::vector<Vec3> expectation;  // <I_j>
    Vec3 polarization_axis{0, 0, 1};
    std::uint64_t seed = 0;
};

enum class Source { random_spins, size_distribution, alloy, interface };
enum class Method { closed_form, monte_carlo, multi_geometry };

const char* to_string(Source s);
const char* to_string(Method m);

/// Field statistics for one inhomogeneity source.  Fields in Gauss;
/// delta_E in eV; T2* in seconds (infinity when delta_B = 0).
struct FieldStatistics {
    Source source = Source::random_spins;
    Method method = Method::closed_form;
    Vec3 field_G{};              // baseline B_N of the scenario
    double delta_B_G = 0.0;
    std::string direction;       // "random" or the polarization axis
    double delta_E_eV = 0.0;
    double t2_star_s = 0.0;
    std::size_t mc_samples = 0;
    double mc_stderr_G = 0.0;
    bool degenerate = false;     // MC samples were identical
};

/// B_N = sum_j A_j <I_j> / (g_e mu_B), in Gauss.
Vec3 effective_field(const hyperfine::HyperfineMap& map, const NuclearSpinConfig& config,
                     const geometry::AtomisticStructure& s, const physcore::Database& db,
                     double g_e);

/// <I_j> = I_j * axis for every nucleus.
NuclearSpinConfig polarized_config(const geometry::AtomisticStructure& s,
                                   const physcore::Database& db, const Vec3& axis);

/// Independent per-site random orientations with E<I_j> = 0 and
/// E|<I_j>|^2 = I_j (I_j + 1): uniform axis, uniform projection in
/// {-I..I}, scaled by sqrt(3) so the sampled second moment matches the
/// quantum one entering the closed-form fluctuation.
NuclearSpinConfig sample_unpolarized(const geometry::AtomisticStructure& s,
                                     const physcore::Database& db, std::uint64_t seed);

/// Closed-form fluctuation sqrt(sum A_j^2 I_j(I_j+1)) / (g_e mu_B).
FieldStatistics delta_unpolarized_closed_form(const hyperfine::HyperfineMap& map,
                                              const geometry::AtomisticStructure& s,
                                              const physcore::Database& db, double g_e);

/// Sample standard deviation of B_N over n unpolarized draws, with
/// jackknife standard error.
FieldStatistics delta_unpolarized_monte_carlo(const hyperfine::HyperfineMap& map,
                                              const geometry::AtomisticStructure& s,
                                              const physcore::Database& db, double g_e,
                                              std::size_t n, std::uint64_t seed);

struct DisorderMode {
    Source source = Source::alloy;  // alloy or interface
    double alloy_fraction = 0.5;
};

/// Frozen-coupling fluctuation sqrt(sum A_j^2 Var I^n_j) / (g_e mu_B);
/// the variance is x(1-x)(I_dotcation - I_bufcation)^2 on dot cations in
/// alloy mode and 0.25 (..)^2 on interface-region cations in interface
/// mode, zero on anions.
FieldStatistics delta_disorder(const hyperfine::HyperfineMap& map,
                               const geometry::AtomisticStructure& s,
                               const physcore::Database& db, double g_e,
                               const DisorderMode& mode, const Vec3& axis);

using PipelineHandle = std::function<std::pair<hyperfine::HyperfineMap,
                                               geometry::AtomisticStructure>(
    const geometry::DotGeometry&, std::size_t)>;

/// Population standard deviation of |B_N| over fully polarized fields of
/// several dot geometries, each produced by the supplied pipeline handle.
FieldStatistics delta_size(const std::vector<geometry::DotGeometry>& geometries,
                           const Vec3& axis, const physcore::Database& db, double g_e,
                           const PipelineHandle& handle);

struct OverlapReport {
    std::vector<double> overlaps;            // |<a|b>| per pair, lexicographic
    std::vector<double> density_shift_rel;   // |mean per-site density change| /
                                             // mean density, per pair
};

OverlapReport overlap_and_density_fluctuation(
    const std::vector<const electronic::WaveFunction*>& wfs);

/// delta_E = g_e mu_B dB, T2* = hbar / delta_E (infinity sentinel at 0).
void dephasing(double delta_B_G, double g_e, const physcore::PhysicalConstants& c,
               double& delta_E_eV, double& t2_star_s);

/// Table-style summary: one row per source.
void export_summary(const std::vector<FieldStatistics>& rows, const std::string& txt_path,
                    const std::string& json_path);

} // namespace dotspin::spinbath
