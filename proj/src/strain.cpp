// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include "dotspin/strain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dotspin::strain {

using geometry::AtomisticStructure;
using geometry::Sublattice;

VffModel VffModel::from_database(const physcore::Database& db,
                                 const AtomisticStructure& s) {
    VffModel m;
    const std::size_t n = s.species_names.size();
    m.params_.assign(n, std::vector<BondParams>(n));
    m.present_.assign(n, std::vector<bool>(n, false));

    for (const auto& mat_name : db.material_names()) {
        const auto& mat = db.material(mat_name);
        std::size_t ci = n, ai = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (s.species_names[i] == mat.cation) ci = i;
            if (s.species_names[i] == mat.anion) ai = i;
        }
        if (ci == n || ai == n) continue;
        BondParams p;
        p.alpha = mat.vff.alpha;
        p.beta = mat.vff.beta;
        p.d0 = mat.ideal_bond_length_nm();
        m.params_[ci][ai] = p;
        m.present_[ci][ai] = true;
    }
    return m;
}

const VffModel::BondParams& VffModel::bond(std::uint8_t c, std::uint8_t a) const {
    if (c >= params_.size() || a >= params_.size() || !present_[c][a]) {
        throw InputError("VFF parameters missing for species pair " + std::to_string(c) +
                         "-" + std::to_string(a));
    }
    return params_[c][a];
}

VffSystem::VffSystem(const AtomisticStructure& s, VffModel model, RelaxOptions options)
    : s_(s), model_(std::move(model)), opt_(options), nbr_(geometry::build_neighbors(s)) {
    pinned_.assign(s.size(), 0);
    if (!nbr_.periodic) {
        double lo[3] = {1e30, 1e30, 1e30}, hi[3] = {-1e30, -1e30, -1e30};
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Vec3 p = s.position(i);
            const double c[3] = {p.x, p.y, p.z};
            for (int d = 0; d < 3; ++d) {
                lo[d] = std::min(lo[d], c[d]);
                hi[d] = std::max(hi[d], c[d]);
            }
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Vec3 p = s.position(i);
            const double c[3] = {p.x, p.y, p.z};
            for (int d = 0; d < 3; ++d) {
                if (c[d] - lo[d] < opt_.pin_shell_nm || hi[d] - c[d] < opt_.pin_shell_nm) {
                    pinned_[i] = 1;
                    break;
                }
            }
        }
    }
    // validate parameter coverage once
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.sublattice(i) != Sublattice::cation) continue;
        for (int b = 0; b < 4; ++b) {
            const auto j = nbr_.neighbors[i][b];
            if (j >= 0) (void)model_.bond(s.species_index[i], s.species_index[j]);
        }
    }
}

Vec3 VffSystem::wrap_shift(std::size_t i, int b) const {
    const double q = s_.grid_constant_nm / 4.0;
    const auto& w = nbr_.wrap[i][b];
    return {w[0] * q, w[1] * q, w[2] * q};
}

double VffSystem::energy(const std::vector<Vec3>& x) const {
    if (x.size() != s_.size()) throw InputError("position array size mismatch");
    double e = 0.0;

    for (std::size_t i = 0; i < s_.size(); ++i) {
        const bool is_cation = s_.sublattice(i) == Sublattice::cation;

        // bond terms counted once, from the cation end
        if (is_cation) {
            for (int b = 0; b < 4; ++b) {
                const auto j = nbr_.neighbors[i][b];
                if (j < 0) continue;
                const auto& p = model_.bond(s_.species_index[i], s_.species_index[j]);
                const Vec3 r = x[j] + wrap_shift(i, b) - x[i];
                const double d2 = r.norm2();
                const double dev = d2 - p.d0 * p.d0;
                e += 3.0 * p.alpha / (8.0 * p.d0 * p.d0) * dev * dev;
            }
        }

        // angle terms at every vertex
        for (int b1 = 0; b1 < 4; ++b1) {
            const auto j = nbr_.neighbors[i][b1];
            if (j < 0) continue;
            const auto ci = is_cation ? s_.species_index[i] : s_.species_index[j];
            const auto ai = is_cation ? s_.species_index[j] : s_.species_index[i];
            const auto& pj = model_.bond(ci, ai);
            const Vec3 rj = x[j] + wrap_shift(i, b1) - x[i];
            for (int b2 = b1 + 1; b2 < 4; ++b2) {
                const auto k = nbr_.neighbors[i][b2];
                if (k < 0) continue;
                const auto ck = is_cation ? s_.species_index[i] : s_.species_index[k];
                const auto ak = is_cation ? s_.species_index[k] : s_.species_index[i];
                const auto& pk = model_.bond(ck, ak);
                const Vec3 rk = x[k] + wrap_shift(i, b2) - x[i];
                const double beta = std::sqrt(pj.beta * pk.beta);
                const double d0d0 = pj.d0 * pk.d0;
                const double g = rj.dot(rk) + d0d0 / 3.0;
                e += 3.0 * beta / (8.0 * d0d0) * g * g;
            }
        }
    }
    return e;
}

void VffSystem::gradient(const std::vector<Vec3>& x, std::vector<Vec3>& grad) const {
    if (x.size() != s_.size()) throw InputError("position array size mismatch");
    grad.assign(s_.size(), Vec3{});

#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(s_.size()); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        if (pinned_[i]) continue;
        Vec3 g{};

        const bool is_cation = s_.sublattice(i) == Sublattice::cation;

        // bond terms: site i participates in every bond to its neighbors
        for (int b = 0; b < 4; ++b) {
            const auto j = nbr_.neighbors[i][b];
            if (j < 0) continue;
            const auto ci = is_cation ? s_.species_index[i] : s_.species_index[j];
            const auto ai = is_cation ? s_.species_index[j] : s_.species_index[i];
            const auto& p = model_.bond(ci, ai);
            const Vec3 r = x[j] + wrap_shift(i, b) - x[i];
            const double dev = r.norm2() - p.d0 * p.d0;
            const double c = 3.0 * p.alpha / (2.0 * p.d0 * p.d0) * dev;  // 4 * 3a/8d0^2
            g -= c * r;
        }

        // angle terms at vertex i
        for (int b1 = 0; b1 < 4; ++b1) {
            const auto j = nbr_.neighbors[i][b1];
            if (j < 0) continue;
            const auto cj = is_cation ? s_.species_index[i] : s_.species_index[j];
            const auto aj = is_cation ? s_.species_index[j] : s_.species_index[i];
            const auto& pj = model_.bond(cj, aj);
            const Vec3 rj = x[j] + wrap_shift(i, b1) - x[i];
            for (int b2 = b1 + 1; b2 < 4; ++b2) {
                const auto k = nbr_.neighbors[i][b2];
                if (k < 0) continue;
                const auto ck2 = is_cation ? s_.species_index[i] : s_.species_index[k];
                const auto ak2 = is_cation ? s_.species_index[k] : s_.species_index[i];
                const auto& pk = model_.bond(ck2, ak2);
                const Vec3 rk = x[k] + wrap_shift(i, b2) - x[i];
                const double beta = std::sqrt(pj.beta * pk.beta);
                const double d0d0 = pj.d0 * pk.d0;
                const double gg = rj.dot(rk) + d0d0 / 3.0;
                const double c = 3.0 * beta / (4.0 * d0d0) * gg;  // 2 * 3b/8d0d0
                g -= c * (rj + rk);
            }
        }

        // angle terms at neighboring vertices where i is an arm
        for (int b = 0; b < 4; ++b) {
            const auto v = nbr_.neighbors[i][b];
            if (v < 0) continue;
            const bool v_cation = s_.sublattice(v) == Sublattice::cation;
            const Vec3 shift_iv = wrap_shift(i, b);  // i sees v at x[v] + shift
            // position of i relative to vertex v: -(x[v] + shift - x[i])
            const Vec3 ri = x[i] - (x[v] + shift_iv);
            const auto cv = v_cation ? s_.species_index[v] : s_.species_index[i];
            const auto av = v_cation ? s_.species_index[i] : s_.species_index[v];
            const auto& pi = model_.bond(cv, av);
            for (int b2 = 0; b2 < 4; ++b2) {
                const auto k = nbr_.neighbors[v][b2];
                if (k < 0 || static_cast<std::size_t>(k) == i) continue;
                const auto cv2 = v_cation ? s_.species_index[v] : s_.species_index[k];
                const auto av2 = v_cation ? s_.species_index[k] : s_.species_index[v];
                const auto& pk = model_.bond(cv2, av2);
                const Vec3 rk = x[k] + wrap_shift(v, b2) - x[v];
                const double beta = std::sqrt(pi.beta * pk.beta);
                const double d0d0 = pi.d0 * pk.d0;
                const double gg = ri.dot(rk) + d0d0 / 3.0;
                const double c = 3.0 * beta / (4.0 * d0d0) * gg;
                g += c * rk;
            }
        }

        grad[i] = g;
    }
}

namespace {
double max_atom_norm(const std::vector<Vec3>& g) {
    double m = 0.0;
    for (const auto& v : g) m = std::max(m, v.norm());
    return m;
}
} // namespace

RelaxationResult VffSystem::relax() const { return relax(ideal_positions()); }

RelaxationResult VffSystem::relax(std::vector<Vec3> x) const {
    RelaxationResult res;
    std::vector<Vec3> g, g_new, d, xt;
    gradient(x, g);
    double gnorm = max_atom_norm(g);
    double e = energy(x);

    if (gnorm <= opt_.tolerance_eV_per_nm) {
        res.positions = std::move(x);
        res.energy_eV = e;
        res.gradient_norm = gnorm;
        res.converged = true;
        return res;
    }

    d.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = -1.0 * g[i];
    double step = 1e-3;
    int it = 0;

    for (; it < opt_.max_iterations; ++it) {
        // Armijo backtracking along d
        double gd = 0.0, gg = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            gd += g[i].dot(d[i]);
            gg += g[i].dot(g[i]);
        }
        if (gd >= 0.0) {  // not a descent direction: restart with steepest
            for (std::size_t i = 0; i < x.size(); ++i) d[i] = -1.0 * g[i];
            gd = -gg;
        }

        double t = step;
        double e_new = 0.0;
        bool accepted = false;
        xt.resize(x.size());
        for (int ls = 0; ls < 40; ++ls) {
            for (std::size_t i = 0; i < x.size(); ++i) xt[i] = x[i] + t * d[i];
            e_new = energy(xt);
            if (e_new <= e + 1e-4 * t * gd) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;

        x.swap(xt);
        e = e_new;
        step = t * 2.0;
        gradient(x, g_new);
        gnorm = max_atom_norm(g_new);
        if (gnorm <= opt_.tolerance_eV_per_nm) {
            g.swap(g_new);
            ++it;
            break;
        }

        // Polak-Ribiere+ update
        double num = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            num += g_new[i].dot(g_new[i] - g[i]);
        }
        const double beta = std::max(0.0, num / gg);
        for (std::size_t i = 0; i < x.size(); ++i) {
            d[i] = -1.0 * g_new[i] + beta * d[i];
        }
        g.swap(g_new);
    }

    res.positions = std::move(x);
    res.energy_eV = e;
    res.gradient_norm = gnorm;
    res.iterations = it;
    res.converged = gnorm <= opt_.tolerance_eV_per_nm;
    if (!res.converged) {
        // reported, not thrown: callers decide whether a loose relaxation
        // is acceptable for their tier
        std::fprintf(stderr, "[strain] relax stopped at %d iterations, |grad|=%.3e\n",
                     res.iterations, res.gradient_norm);
    }
    return res;
}

std::vector<Vec3> VffSystem::ideal_positions() const {
    std::vector<Vec3> x(s_.size());
    for (std::size_t i = 0; i < s_.size(); ++i) x[i] = s_.position(i);
    return x;
}

std::vector<BondGeometry> VffSystem::bond_geometry(const std::vector<Vec3>& x) const {
    std::vector<BondGeometry> out;
    for (std::size_t i = 0; i < s_.size(); ++i) {
        if (s_.sublattice(i) != Sublattice::cation) continue;
        for (int b = 0; b < 4; ++b) {
            const auto j = nbr_.neighbors[i][b];
            if (j < 0) continue;
            BondGeometry bg;
            bg.i = static_cast<std::int32_t>(i);
            bg.j = j;
            const Vec3 r = x[j] + wrap_shift(i, b) - x[i];
            bg.length_nm = r.norm();
            bg.direction = {r.x / bg.length_nm, r.y / bg.length_nm, r.z / bg.length_nm};
            out.push_back(bg);
        }
    }
    return out;
}

void export_strain_summary(const AtomisticStructure& s, const VffSystem& sys,
                           const RelaxationResult& r, const std::string& path) {
    const auto bonds = sys.bond_geometry(r.positions);
    // accumulate per region of the bond's cation end
    double sum[3] = {}, sum2[3] = {};
    std::size_t n[3] = {};
    for (const auto& b : bonds) {
        const int reg = static_cast<int>(s.region[b.i]);
        const double d0 = s.grid_constant_nm * std::sqrt(3.0) / 4.0;
        const double dev = b.length_nm - d0;
        sum[reg] += dev;
        sum2[reg] += dev * dev;
        n[reg] += 1;
    }
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw InputError("cannot open for writing: " + path);
    std::fprintf(f, "# region n_bonds mean_dev_nm sigma_dev_nm "
                    "(deviation from substrate bond length)\n");
    for (int reg = 0; reg < 3; ++reg) {
        if (n[reg] == 0) continue;
        const double mean = sum[reg] / static_cast<double>(n[reg]);
        const double var = sum2[reg] / static_cast<double>(n[reg]) - mean * mean;
        std::fprintf(f, "%s %zu %.6e %.6e\n",
                     geometry::to_string(static_cast<geometry::Region>(reg)), n[reg],
                     mean, std::sqrt(std::max(0.0, var)));
    }
    std::fprintf(f, "# relax energy_eV %.12e iterations %d grad_norm %.3e\n",
                 r.energy_eV, r.iterations, r.gradient_norm);
    std::fclose(f);
}

} // namespace dotspin::strain
