// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include "dotspin/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace dotspin::electronic {

using geometry::AtomisticStructure;
using geometry::NeighborTable;
using geometry::Sublattice;

namespace {

template <int NB>
void block_gemv(const double* blk, const double* x, double* y) {
    for (int a = 0; a < NB; ++a) {
        double acc = 0.0;
        const double* row = blk + a * NB;
        for (int b = 0; b < NB; ++b) acc += row[b] * x[b];
        y[a] += acc;
    }
}

void block_gemv_n(int nb, const double* blk, const double* x, double* y) {
    for (int a = 0; a < nb; ++a) {
        double acc = 0.0;
        const double* row = blk + a * nb;
        for (int b = 0; b < nb; ++b) acc += row[b] * x[b];
        y[a] += acc;
    }
}

} // namespace

void BlockSparseMatrix::apply_shifted(const double* x, double* y, double sigma) const {
    const int nb = norb;
    const std::int64_t nb2 = static_cast<std::int64_t>(nb) * nb;

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < nsites; ++i) {
        double* yi = y + i * nb;
        for (int a = 0; a < nb; ++a) yi[a] = -sigma * x[i * nb + a];
        for (std::int32_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            const double* blk = val.data() + static_cast<std::int64_t>(k) * nb2;
            const double* xj = x + static_cast<std::int64_t>(col[k]) * nb;
            switch (nb) {
                case 1: yi[0] += blk[0] * xj[0]; break;
                case 5: block_gemv<5>(blk, xj, yi); break;
                case 10: block_gemv<10>(blk, xj, yi); break;
                default: block_gemv_n(nb, blk, xj, yi); break;
            }
        }
    }
}

void BlockSparseMatrix::apply_shifted_mv(const double* x, double* y, double sigma,
                                         int ncols) const {
    const int nb = norb;
    const std::int64_t nb2 = static_cast<std::int64_t>(nb) * nb;
    const std::int64_t ld = dim();

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < nsites; ++i) {
        for (int c = 0; c < ncols; ++c) {
            double* yi = y + c * ld + i * nb;
            const double* xi = x + c * ld + i * nb;
            for (int a = 0; a < nb; ++a) yi[a] = -sigma * xi[a];
        }
        for (std::int32_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            const double* blk = val.data() + static_cast<std::int64_t>(k) * nb2;
            const std::int64_t j = col[k];
            for (int c = 0; c < ncols; ++c) {
                const double* xj = x + c * ld + j * nb;
                double* yi = y + c * ld + i * nb;
                switch (nb) {
                    case 1: yi[0] += blk[0] * xj[0]; break;
                    case 5: block_gemv<5>(blk, xj, yi); break;
                    case 10: block_gemv<10>(blk, xj, yi); break;
                    default: block_gemv_n(nb, blk, xj, yi); break;
                }
            }
        }
    }
}

const double* BlockSparseMatrix::diagonal_block(std::int64_t site) const {
    for (std::int32_t k = row_ptr[site]; k < row_ptr[site + 1]; ++k) {
        if (col[k] == site) {
            return val.data() + static_cast<std::int64_t>(k) * norb * norb;
        }
    }
    throw InputError("missing diagonal block");
}

double BlockSparseMatrix::max_asymmetry() const {
    const int nb = norb;
    const std::int64_t nb2 = static_cast<std::int64_t>(nb) * nb;
    double worst = 0.0;
    for (std::int64_t i = 0; i < nsites; ++i) {
        for (std::int32_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            const std::int64_t j = col[k];
            const double* bij = val.data() + static_cast<std::int64_t>(k) * nb2;
            // find (j, i)
            const double* bji = nullptr;
            for (std::int32_t k2 = row_ptr[j]; k2 < row_ptr[j + 1]; ++k2) {
                if (col[k2] == i) {
                    bji = val.data() + static_cast<std::int64_t>(k2) * nb2;
                    break;
                }
            }
            if (!bji) return std::numeric_limits<double>::infinity();
            for (int a = 0; a < nb; ++a) {
                for (int b = 0; b < nb; ++b) {
                    worst = std::max(worst, std::abs(bij[a * nb + b] - bji[b * nb + a]));
                }
            }
        }
    }
    return worst;
}

namespace {

/// Material record for the binary formed by a cation species and the anion.
const TbMaterial& bond_material(const TbParameterSet& params,
                                const AtomisticStructure& s, std::uint8_t cation_sp,
                                std::uint8_t anion_sp) {
    const std::string binary =
        s.species_names[cation_sp] + s.species_names[anion_sp];
    auto it = params.materials.find(binary);
    if (it == params.materials.end()) {
        throw InputError("parameter set '" + params.name + "' missing material '" +
                         binary + "'");
    }
    return it->second;
}

} // namespace

BlockSparseMatrix assemble(const AtomisticStructure& s, const NeighborTable& nbr,
                           const TbParameterSet& params, const AssembleOptions& opt) {
    const int nb = orbital_count(params.tier);
    const std::int64_t n = static_cast<std::int64_t>(s.size());
    const std::int64_t nb2 = static_cast<std::int64_t>(nb) * nb;
    const bool strained = opt.positions != nullptr;
    if (strained && opt.positions->size() != s.size()) {
        throw InputError("assemble: positions array size mismatch");
    }

    // parameter coverage check before entering parallel assembly
    {
        std::vector<bool> seen(s.species_names.size() * s.species_names.size(), false);
        for (std::int64_t i = 0; i < n; ++i) {
            if (s.sublattice(i) != Sublattice::cation) continue;
            for (int b = 0; b < 4; ++b) {
                const auto j = nbr.neighbors[i][b];
                if (j < 0) continue;
                const std::size_t key =
                    s.species_index[i] * s.species_names.size() + s.species_index[j];
                if (!seen[key]) {
                    seen[key] = true;
                    (void)bond_material(params, s, s.species_index[i],
                                        s.species_index[j]);
                }
            }
        }
        (void)params.material(s.geometry.buffer_material);
    }

    BlockSparseMatrix H;
    H.norb = nb;
    H.nsites = n;
    H.row_ptr.assign(n + 1, 0);

    // sorted block columns: diagonal + present neighbors
    std::vector<std::array<std::int32_t, 5>> cols(n);
    std::vector<std::array<std::int8_t, 5>> bond_slot(n);  // neighbor slot or -1
    for (std::int64_t i = 0; i < n; ++i) {
        int cnt = 0;
        cols[i][cnt] = static_cast<std::int32_t>(i);
        bond_slot[i][cnt] = -1;
        ++cnt;
        for (int b = 0; b < 4; ++b) {
            const auto j = nbr.neighbors[i][b];
            if (j >= 0) {
                cols[i][cnt] = j;
                bond_slot[i][cnt] = static_cast<std::int8_t>(b);
                ++cnt;
            }
        }
        // insertion sort by column
        for (int a = 1; a < cnt; ++a) {
            for (int b2 = a; b2 > 0 && cols[i][b2] < cols[i][b2 - 1]; --b2) {
                std::swap(cols[i][b2], cols[i][b2 - 1]);
                std::swap(bond_slot[i][b2], bond_slot[i][b2 - 1]);
            }
        }
        H.row_ptr[i + 1] = H.row_ptr[i] + cnt;
    }
    H.col.resize(H.row_ptr[n]);
    H.val.assign(static_cast<std::int64_t>(H.row_ptr[n]) * nb2, 0.0);

    const double q = s.grid_constant_nm / 4.0;
    const double ideal_grid_bond = s.grid_constant_nm * std::sqrt(3.0) / 4.0;

    auto bond_vector = [&](std::int64_t i, int b, std::int64_t j) -> Vec3 {
        const auto& w = nbr.wrap[i][b];
        const Vec3 shift{w[0] * q, w[1] * q, w[2] * q};
        if (strained) return (*opt.positions)[j] + shift - (*opt.positions)[i];
        const Vec3 pj = s.position(j);
        const Vec3 pi = s.position(i);
        return pj + shift - pi;
    };

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const bool is_cation = s.sublattice(i) == Sublattice::cation;

        // onsite energies: cation from its own binary, anion averaged over
        // the binaries of its bonds
        std::vector<double> onsite(nb, 0.0);
        {
            std::vector<double> acc(nb, 0.0);
            std::vector<double> lowdin(nb, 0.0);
            double strain_acc = 0.0;
            bool any_lowdin = false;
            int nbonds = 0;
            for (int b = 0; b < 4; ++b) {
                const auto j = nbr.neighbors[i][b];
                if (j < 0) continue;
                const std::uint8_t cs = is_cation ? s.species_index[i] : s.species_index[j];
                const std::uint8_t as = is_cation ? s.species_index[j] : s.species_index[i];
                const auto& mat = bond_material(params, s, cs, as);
                const auto v = onsite_vector(
                    is_cation ? mat.onsite_cation : mat.onsite_anion, params.tier);
                for (int a = 0; a < nb; ++a) acc[a] += v[a] + mat.energy_shift_eV;
                const auto& lw = is_cation ? mat.lowdin_cation : mat.lowdin_anion;
                if (strained && lw) {
                    any_lowdin = true;
                    const auto lv = onsite_vector(*lw, params.tier);
                    for (int a = 0; a < nb; ++a) lowdin[a] += lv[a];
                    const double d0 = mat.d0_nm > 0 ? mat.d0_nm : ideal_grid_bond;
                    strain_acc += bond_vector(i, b, j).norm() / d0 - 1.0;
                }
                ++nbonds;
            }
            if (nbonds == 0) {
                const auto& mat = params.material(s.geometry.buffer_material);
                const auto v = onsite_vector(
                    is_cation ? mat.onsite_cation : mat.onsite_anion, params.tier);
                for (int a = 0; a < nb; ++a) onsite[a] = v[a] + mat.energy_shift_eV;
            } else {
                for (int a = 0; a < nb; ++a) onsite[a] = acc[a] / nbonds;
                if (any_lowdin) {
                    const double mean_bond_strain = strain_acc / nbonds;
                    for (int a = 0; a < nb; ++a) {
                        onsite[a] += lowdin[a] / nbonds * mean_bond_strain;
                    }
                }
            }
            if (nbonds < 4 && !std::isnan(opt.passivation_level_eV)) {
                for (int a = 0; a < nb; ++a) onsite[a] = opt.passivation_level_eV;
            }
        }

        for (std::int32_t k = H.row_ptr[i]; k < H.row_ptr[i + 1]; ++k) {
            const int slot = k - H.row_ptr[i];
            const std::int32_t j = cols[i][slot];
            double* blk = H.val.data() + static_cast<std::int64_t>(k) * nb2;
            H.col[k] = j;
            if (j == i) {
                for (int a = 0; a < nb; ++a) blk[a * nb + a] = onsite[a];
                continue;
            }
            const int b = bond_slot[i][slot];
            const std::uint8_t cs = is_cation ? s.species_index[i] : s.species_index[j];
            const std::uint8_t as = is_cation ? s.species_index[j] : s.species_index[i];
            const auto& mat = bond_material(params, s, cs, as);

            const Vec3 r = bond_vector(i, b, j);
            const double d = r.norm();
            const Vec3 u{r.x / d, r.y / d, r.z / d};

            TwoCenterIntegrals ints = mat.integrals;  // anion -> cation
            if (strained) {
                const double d0 = mat.d0_nm > 0 ? mat.d0_nm : ideal_grid_bond;
                ints = scale_integrals(ints, params, d0, d);
            }

            // orient: stored integrals are anion(1) -> cation(2)
            const bool i_is_anion = !is_cation;
            std::array<double, 100> blk_ac;
            if (i_is_anion) {
                blk_ac = slater_koster_block(u.x, u.y, u.z, ints, params.tier);
            } else {
                // evaluate for the anion -> cation direction (-u), transpose
                const auto t = slater_koster_block(-u.x, -u.y, -u.z, ints, params.tier);
                for (int a = 0; a < nb; ++a) {
                    for (int b2 = 0; b2 < nb; ++b2) {
                        blk_ac[a * nb + b2] = t[b2 * nb + a];
                    }
                }
            }
            for (int a = 0; a < nb * nb; ++a) blk[a] = blk_ac[a];
        }
    }

    return H;
}

std::vector<double> bulk_gamma_levels(const TbParameterSet& params,
                                      const std::string& material) {
    const auto& mat = params.material(material);
    const int nb = orbital_count(params.tier);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * nb, 2 * nb);

    const auto ea = onsite_vector(mat.onsite_anion, params.tier);
    const auto ec = onsite_vector(mat.onsite_cation, params.tier);
    for (int a = 0; a < nb; ++a) {
        h(a, a) = ea[a] + mat.energy_shift_eV;          // anion block first
        h(nb + a, nb + a) = ec[a] + mat.energy_shift_eV;
    }

    static const double kDirs[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    const double inv = 1.0 / std::sqrt(3.0);
    for (const auto& dvec : kDirs) {
        const auto blk = slater_koster_block(dvec[0] * inv, dvec[1] * inv, dvec[2] * inv,
                                             mat.integrals, params.tier);
        for (int a = 0; a < nb; ++a) {
            for (int b = 0; b < nb; ++b) {
                h(a, nb + b) += blk[a * nb + b];
            }
        }
    }
    h.block(nb, 0, nb, nb) = h.block(0, nb, nb, nb).transpose();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + 2 * nb);
    return out;
}

BandEdges bulk_band_edges(const TbParameterSet& params, const std::string& material) {
    const auto levels = bulk_gamma_levels(params, material);
    BandEdges e;
    if (params.tier == BasisTier::s_only) {
        e.vbm_eV = levels[0];
        e.cbm_eV = levels[0];
        return e;
    }
    // 8 valence electrons per 2-atom cell, spinless: 4 filled levels
    e.vbm_eV = levels[3];
    e.cbm_eV = levels[4];
    return e;
}

std::vector<double> bulk_bands_at(const TbParameterSet& params,
                                  const std::string& material, const Vec3& k_frac) {
    const auto& mat = params.material(material);
    const int nb = orbital_count(params.tier);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2 * nb, 2 * nb);

    const auto ea = onsite_vector(mat.onsite_anion, params.tier);
    const auto ec = onsite_vector(mat.onsite_cation, params.tier);
    for (int a = 0; a < nb; ++a) {
        h(a, a) = ea[a] + mat.energy_shift_eV;
        h(nb + a, nb + a) = ec[a] + mat.energy_shift_eV;
    }

    // anion at the origin, cations at the four bond vectors (units of a/4)
    static const double kDirs[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    const double inv = 1.0 / std::sqrt(3.0);
    for (const auto& dvec : kDirs) {
        const auto blk = slater_koster_block(dvec[0] * inv, dvec[1] * inv, dvec[2] * inv,
                                             mat.integrals, params.tier);
        // phase: k in units of 2 pi / a, bond vector a/4 (d1,d2,d3)
        const double arg = 2.0 * M_PI * 0.25 *
                           (k_frac.x * dvec[0] + k_frac.y * dvec[1] + k_frac.z * dvec[2]);
        const std::complex<double> phase(std::cos(arg), std::sin(arg));
        for (int a = 0; a < nb; ++a) {
            for (int b = 0; b < nb; ++b) {
                h(a, nb + b) += blk[a * nb + b] * phase;
            }
        }
    }
    h.block(nb, 0, nb, nb) = h.block(0, nb, nb, nb).adjoint();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    return std::vector<double>(es.eigenvalues().data(), es.eigenvalues().data() + 2 * nb);
}

double conduction_floor(const TbParameterSet& params, const std::string& material,
                        int samples) {
    const int cb_index = params.tier == BasisTier::s_only ? 0 : 4;
    double floor_e = std::numeric_limits<double>::infinity();
    const Vec3 ends[2] = {{1, 0, 0}, {0.5, 0.5, 0.5}};  // X and L
    for (const Vec3& end : ends) {
        for (int i = 0; i <= samples; ++i) {
            const double t = static_cast<double>(i) / samples;
            const auto bands = bulk_bands_at(params, material, t * end);
            floor_e = std::min(floor_e, bands[cb_index]);
        }
    }
    return floor_e;
}

} // namespace dotspin::electronic
