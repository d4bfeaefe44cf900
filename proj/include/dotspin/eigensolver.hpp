// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "dotspin/hamiltonian.hpp"

namespace dotspin::electronic {

struct FoldedSolveOptions {
    int nev = 4;             // eigenpairs wanted
    int block_extra = 2;     // guard vectors beyond nev
    double tol_eV = 1e-8;    // H-residual tolerance per state
    int max_iterations = 3000;
    std::uint64_t seed = 0x5eed;
    bool verbose = false;
};

struct FoldedSolveResult {
    std::vector<double> eigenvalues_eV;        // ordered by |E - sigma|
    std::vector<double> residuals;             // ||Hx - Ex||
    std::vector<std::vector<double>> vectors;  // unit norm
    int iterations = 0;
    bool converged = false;
};

/// Eigenpairs of H nearest the shift: block preconditioned iteration on the
/// folded operator (H - sigma)^2 with Rayleigh-Ritz in H on the converged
/// subspace.  Deterministic for a fixed seed and thread count.
FoldedSolveResult solve_folded(const BlockSparseMatrix& H, double sigma,
                               const FoldedSolveOptions& options);

} // namespace dotspin::electronic
