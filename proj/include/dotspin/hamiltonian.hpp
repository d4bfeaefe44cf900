// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "dotspin/geometry.hpp"
#include "dotspin/strain.hpp"
#include "dotspin/tbparams.hpp"

namespace dotspin::electronic {

/// Block-sparse row storage with square norb x norb blocks, one block row
/// per site, columns sorted.  Assembled exactly symmetric: the (j,i) block
/// is the stored transpose of the (i,j) block.
class BlockSparseMatrix {
public:
    int norb = 1;
    std::int64_t nsites = 0;
    std::vector<std::int32_t> row_ptr;  // block rows, size nsites+1
    std::vector<std::int32_t> col;      // block column (site) indices
    std::vector<double> val;            // blocks, row-major, norb^2 each

    std::int64_t dim() const { return nsites * norb; }
    std::int64_t nnz_blocks() const { return static_cast<std::int64_t>(col.size()); }

    /// y = (A - sigma I) x
    void apply_shifted(const double* x, double* y, double sigma) const;
    void multiply(const double* x, double* y) const { apply_shifted(x, y, 0.0); }

    /// Multivector form, column-major with leading dimension dim(); reads
    /// the matrix once per sweep.
    void apply_shifted_mv(const double* x, double* y, double sigma, int ncols) const;

    const double* diagonal_block(std::int64_t site) const;

    /// max |A_ij - A_ji^T| over stored blocks (0 for a correct assembly)
    double max_asymmetry() const;
};

struct AssembleOptions {
    /// Relaxed positions; when present, bond directions and lengths come
    /// from them and Harrison scaling plus any Lowdin onsite corrections
    /// apply.  Absent = ideal substrate grid, integrals unscaled.
    const std::vector<Vec3>* positions = nullptr;
    /// Under-coordinated (box surface) sites get this onsite level on all
    /// orbitals, parking their dangling-bond states deep in the valence
    /// continuum instead of the gap.  NaN disables.
    double passivation_level_eV = -5.0;
};

/// Tight-binding Hamiltonian over the structure's bond topology.  Bond
/// integrals come from the bond's binary compound (cation species + anion);
/// anion onsite energies average over the binaries of the site's bonds.
BlockSparseMatrix assemble(const geometry::AtomisticStructure& s,
                           const geometry::NeighborTable& nbr,
                           const TbParameterSet& params,
                           const AssembleOptions& options = {});

/// Gamma-point levels of the ideal two-atom periodic cell of a material
/// (energy_shift applied), ascending.
std::vector<double> bulk_gamma_levels(const TbParameterSet& params,
                                      const std::string& material);

struct BandEdges {
    double vbm_eV = 0.0;
    double cbm_eV = 0.0;
};

/// Band edges at the Gamma point.  For the s-only tier the lower band plays
/// the conduction role and vbm is reported as the band bottom itself.
BandEdges bulk_band_edges(const TbParameterSet& params, const std::string& material);

/// Bulk band energies at one Bloch vector (units 2*pi/a), ascending.
std::vector<double> bulk_bands_at(const TbParameterSet& params,
                                  const std::string& material, const Vec3& k_frac);

/// Lowest conduction-band energy over a Gamma-X-L sweep; used to verify a
/// parameter set keeps its gap clean across the zone.
double conduction_floor(const TbParameterSet& params, const std::string& material,
                        int samples = 24);

} // namespace dotspin::electronic
