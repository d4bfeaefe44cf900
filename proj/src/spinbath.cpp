// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include "dotspin/spinbath.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "dotspin/rng.hpp"

namespace dotspin::spinbath {

using geometry::AtomisticStructure;
using geometry::Region;
using geometry::Sublattice;
using hyperfine::HyperfineMap;
using physcore::Database;

const char* to_string(Source s) {
    switch (s) {
        case Source::random_spins: return "unpolarized-nuclei";
        case Source::size_distribution: return "dot-size-fluctuation";
        case Source::alloy: return "alloy-disorder";
        case Source::interface: return "interface-disorder";
    }
    return "?";
}

const char* to_string(Method m) {
    switch (m) {
        case Method::closed_form: return "closed-form";
        case Method::monte_carlo: return "monte-carlo";
        case Method::multi_geometry: return "multi-geometry";
    }
    return "?";
}

namespace {

double spin_of(const Database& db, const std::string& elem) {
    return db.species(elem).spin;
}

} // namespace

Vec3 effective_field(const HyperfineMap& map, const NuclearSpinConfig& config,
                     const AtomisticStructure& s, const Database& db, double g_e) {
    if (map.size() != config.expectation.size() || map.size() != s.size()) {
        throw InputError("effective_field: map/config/structure length mismatch");
    }
    const double scale =
        db.constants.erg_per_eV / (g_e * db.constants.bohr_magneton_erg_per_G);
    Vec3 b{};
    for (std::size_t j = 0; j < map.size(); ++j) {
        b += map.coupling_eV[j] * scale * config.expectation[j];
    }
    return b;
}

NuclearSpinConfig polarized_config(const AtomisticStructure& s, const Database& db,
                                   const Vec3& axis) {
    const Vec3 n = normalized(axis);
    NuclearSpinConfig c;
    c.mode = NuclearSpinConfig::Mode::polarized;
    c.polarization_axis = n;
    c.expectation.resize(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) {
        c.expectation[j] = spin_of(db, s.species(j)) * n;
    }
    return c;
}

NuclearSpinConfig sample_unpolarized(const AtomisticStructure& s, const Database& db,
                                     std::uint64_t seed) {
    NuclearSpinConfig c;
    c.mode = NuclearSpinConfig::Mode::unpolarized_sample;
    c.seed = seed;
    c.expectation.resize(s.size());
    const double rt3 = std::sqrt(3.0);
    for (std::size_t j = 0; j < s.size(); ++j) {
        const double spin = spin_of(db, s.species(j));
        rng::Counter r(seed, j);
        // uniform direction
        const double z = 2.0 * r.next_double() - 1.0;
        const double phi = 2.0 * M_PI * r.next_double();
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const Vec3 axis{rho * std::cos(phi), rho * std::sin(phi), z};
        // uniform projection m in {-I, .., I}
        const int levels = static_cast<int>(std::lround(2.0 * spin)) + 1;
        const double m = -spin + static_cast<double>(r.next_below(levels));
        c.expectation[j] = rt3 * m * axis;
    }
    return c;
}

FieldStatistics delta_unpolarized_closed_form(const HyperfineMap& map,
                                              const AtomisticStructure& s,
                                              const Database& db, double g_e) {
    if (map.size() != s.size()) throw InputError("map/structure length mismatch");
    double sum = 0.0;
    for (std::size_t j = 0; j < map.size(); ++j) {
        const double spin = spin_of(db, s.species(j));
        const double a = map.coupling_eV[j];
        sum += a * a * spin * (spin + 1.0);
    }
    FieldStatistics out;
    out.source = Source::random_spins;
    out.method = Method::closed_form;
    out.delta_B_G = std::sqrt(sum) * db.constants.erg_per_eV /
                    (g_e * db.constants.bohr_magneton_erg_per_G);
    out.direction = "random";
    dephasing(out.delta_B_G, g_e, db.constants, out.delta_E_eV, out.t2_star_s);
    return out;
}

FieldStatistics delta_unpolarized_monte_carlo(const HyperfineMap& map,
                                              const AtomisticStructure& s,
                                              const Database& db, double g_e,
                                              std::size_t n, std::uint64_t seed) {
    if (n < 2) throw InputError("monte carlo needs at least 2 samples");
    std::vector<Vec3> fields(n);

#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(n); ++k) {
        const auto cfg = sample_unpolarized(s, db, rng::derive(seed, k));
        fields[k] = effective_field(map, cfg, s, db, g_e);
    }

    Vec3 mean{};
    for (const auto& f : fields) mean += f;
    mean *= 1.0 / static_cast<double>(n);

    double ss = 0.0;
    std::vector<double> dev2(n);
    for (std::size_t k = 0; k < n; ++k) {
        const Vec3 d = fields[k] - mean;
        dev2[k] = d.norm2();
        ss += dev2[k];
    }
    const double sigma = std::sqrt(ss / static_cast<double>(n - 1));

    // jackknife standard error of the standard deviation
    double stderr_jack = 0.0;
    bool degenerate = sigma == 0.0;
    if (!degenerate && n > 2) {
        const double nn = static_cast<double>(n);
        std::vector<double> loo(n);
        double loo_mean = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double ss_k = ss - dev2[k] * nn / (nn - 1.0);
            loo[k] = std::sqrt(std::max(0.0, ss_k / (nn - 2.0)));
            loo_mean += loo[k];
        }
        loo_mean /= nn;
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            acc += (loo[k] - loo_mean) * (loo[k] - loo_mean);
        }
        stderr_jack = std::sqrt((nn - 1.0) / nn * acc);
    }

    FieldStatistics out;
    out.source = Source::random_spins;
    out.method = Method::monte_carlo;
    out.field_G = mean;
    out.delta_B_G = sigma;
    out.direction = "random";
    out.mc_samples = n;
    out.mc_stderr_G = stderr_jack;
    out.degenerate = degenerate;
    dephasing(out.delta_B_G, g_e, db.constants, out.delta_E_eV, out.t2_star_s);
    return out;
}

FieldStatistics delta_disorder(const HyperfineMap& map, const AtomisticStructure& s,
                               const Database& db, double g_e, const DisorderMode& mode,
                               const Vec3& axis) {
    if (map.size() != s.size()) throw InputError("map/structure length mismatch");
    if (mode.source != Source::alloy && mode.source != Source::interface) {
        throw InputError("delta_disorder: mode must be alloy or interface");
    }
    if (mode.alloy_fraction < 0 || mode.alloy_fraction > 1) {
        throw InputError("delta_disorder: alloy fraction outside [0,1]");
    }

    const std::string dot_cat = db.material(s.geometry.dot_material).cation;
    const std::string buf_cat = db.material(s.geometry.buffer_material).cation;
    const double di = spin_of(db, dot_cat) - spin_of(db, buf_cat);

    double var;  // variance of I^n per randomized cation
    Region region;
    if (mode.source == Source::alloy) {
        var = mode.alloy_fraction * (1.0 - mode.alloy_fraction) * di * di;
        region = Region::dot;
    } else {
        var = 0.25 * di * di;
        region = Region::interface;
    }

    double sum = 0.0;
    for (std::size_t j = 0; j < map.size(); ++j) {
        if (s.sublattice(j) != Sublattice::cation) continue;  // zero on anions
        if (s.region[j] != region) continue;
        sum += map.coupling_eV[j] * map.coupling_eV[j] * var;
    }

    FieldStatistics out;
    out.source = mode.source;
    out.method = Method::closed_form;
    out.delta_B_G = std::sqrt(sum) * db.constants.erg_per_eV /
                    (g_e * db.constants.bohr_magneton_erg_per_G);
    const Vec3 n = normalized(axis);
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%.3g,%.3g,%.3g)", n.x, n.y, n.z);
    out.direction = buf;
    dephasing(out.delta_B_G, g_e, db.constants, out.delta_E_eV, out.t2_star_s);
    return out;
}

FieldStatistics delta_size(const std::vector<geometry::DotGeometry>& geometries,
                           const Vec3& axis, const Database& db, double g_e,
                           const PipelineHandle& handle) {
    if (geometries.size() < 2) {
        throw InputError("size-distribution statistic needs at least 2 geometries");
    }
    std::vector<double> mags;
    Vec3 base_field{};
    for (std::size_t k = 0; k < geometries.size(); ++k) {
        auto [map, st] = handle(geometries[k], k);
        const auto cfg = polarized_config(st, db, axis);
        const Vec3 b = effective_field(map, cfg, st, db, g_e);
        if (k == 0) base_field = b;
        mags.push_back(b.norm());
    }
    double mean = 0.0;
    for (double m : mags) mean += m;
    mean /= static_cast<double>(mags.size());
    double var = 0.0;
    for (double m : mags) var += (m - mean) * (m - mean);
    var /= static_cast<double>(mags.size());  // population convention

    FieldStatistics out;
    out.source = Source::size_distribution;
    out.method = Method::multi_geometry;
    out.field_G = base_field;
    out.delta_B_G = std::sqrt(var);
    const Vec3 n = normalized(axis);
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%.3g,%.3g,%.3g)", n.x, n.y, n.z);
    out.direction = buf;
    dephasing(out.delta_B_G, g_e, db.constants, out.delta_E_eV, out.t2_star_s);
    return out;
}

OverlapReport overlap_and_density_fluctuation(
    const std::vector<const electronic::WaveFunction*>& wfs) {
    OverlapReport rep;
    for (std::size_t a = 0; a < wfs.size(); ++a) {
        for (std::size_t b = a + 1; b < wfs.size(); ++b) {
            const auto& wa = *wfs[a];
            const auto& wb = *wfs[b];
            if (wa.amplitudes.size() != wb.amplitudes.size()) {
                throw InputError("overlap: wavefunctions not on congruent grids");
            }
            double ov = 0.0;
            for (std::size_t i = 0; i < wa.amplitudes.size(); ++i) {
                ov += wa.amplitudes[i] * wb.amplitudes[i];
            }
            rep.overlaps.push_back(std::abs(ov));

            const std::size_t ns = wa.site_count();
            double shift = 0.0, mean = 0.0;
            for (std::size_t i = 0; i < ns; ++i) {
                const double da = wa.site_weight(i);
                const double db2 = wb.site_weight(i);
                shift += da - db2;
                mean += 0.5 * (da + db2);
            }
            rep.density_shift_rel.push_back(mean > 0 ? std::abs(shift) / mean : 0.0);
        }
    }
    return rep;
}

void dephasing(double delta_B_G, double g_e, const physcore::PhysicalConstants& c,
               double& delta_E_eV, double& t2_star_s) {
    const double de_erg = std::abs(g_e) * c.bohr_magneton_erg_per_G * delta_B_G;
    delta_E_eV = de_erg / c.erg_per_eV;
    t2_star_s = de_erg > 0 ? c.hbar_erg_s / de_erg
                           : std::numeric_limits<double>::infinity();
}

void export_summary(const std::vector<FieldStatistics>& rows, const std::string& txt_path,
                    const std::string& json_path) {
    std::FILE* f = std::fopen(txt_path.c_str(), "w");
    if (!f) throw InputError("cannot open for writing: " + txt_path);
    std::fprintf(f, "%-24s %12s %12s %12s %-14s %s\n", "source", "dB_N(G)", "dE(eV)",
                 "T2*(s)", "method", "stderr(G)");
    for (const auto& r : rows) {
        char t2[32];
        if (std::isinf(r.t2_star_s)) std::snprintf(t2, sizeof t2, "inf");
        else std::snprintf(t2, sizeof t2, "%.3e", r.t2_star_s);
        std::fprintf(f, "%-24s %12.4g %12.4g %12s %-14s %s%.3g\n", to_string(r.source),
                     r.delta_B_G, r.delta_E_eV, t2, to_string(r.method),
                     r.method == Method::monte_carlo ? "" : "-", r.mc_stderr_G);
    }
    std::fclose(f);

    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["source"] = to_string(r.source);
        row["method"] = to_string(r.method);
        row["delta_B_T"] = r.delta_B_G / physcore::kGaussPerTesla;
        row["field_T"] = {r.field_G.x / physcore::kGaussPerTesla,
                          r.field_G.y / physcore::kGaussPerTesla,
                          r.field_G.z / physcore::kGaussPerTesla};
        row["direction"] = r.direction;
        row["delta_E_eV"] = r.delta_E_eV;
        if (std::isinf(r.t2_star_s)) {
            row["t2_star_s"] = nullptr;
            row["t2_star_infinite"] = true;
        } else {
            row["t2_star_s"] = r.t2_star_s;
            row["t2_star_infinite"] = false;
        }
        if (r.method == Method::monte_carlo) {
            row["mc_samples"] = r.mc_samples;
            row["mc_stderr_T"] = r.mc_stderr_G / physcore::kGaussPerTesla;
            row["degenerate"] = r.degenerate;
        }
        j.push_back(row);
    }
    std::ofstream out(json_path);
    if (!out) throw InputError("cannot open for writing: " + json_path);
    out << j.dump(2) << "\n";
}

} // namespace dotspin::spinbath
