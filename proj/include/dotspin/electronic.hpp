// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "dotspin/eigensolver.hpp"
#include "dotspin/hamiltonian.hpp"

namespace dotspin::electronic {

/// Conduction-state amplitudes over the structure.  Normalized so the
/// squared amplitudes over all sites and orbitals sum to one.
class WaveFunction {
public:
    BasisTier tier = BasisTier::sp3s;
    double eigenvalue_eV = 0.0;
    double residual = 0.0;
    std::vector<double> amplitudes;  // nsites * norb, site-major

    int norb() const { return orbital_count(tier); }
    std::size_t site_count() const { return amplitudes.size() / norb(); }

    /// s amplitude at a site.
    double alpha(std::size_t site) const { return amplitudes[site * norb()]; }
    /// s* amplitude; 0 for the s-only tier.
    double beta(std::size_t site) const {
        const int ss = sstar_index(tier);
        return ss < 0 ? 0.0 : amplitudes[site * norb() + ss];
    }
    /// total weight on a site, all orbitals
    double site_weight(std::size_t site) const {
        const int nb = norb();
        double w = 0.0;
        for (int a = 0; a < nb; ++a) {
            const double c = amplitudes[site * nb + a];
            w += c * c;
        }
        return w;
    }

    double norm2() const;
    /// fraction of the norm carried by s and s* orbitals
    double s_character() const;
};

enum class SigmaMode { midgap, conduction, explicit_value };

struct SolveSettings {
    SigmaMode sigma_mode = SigmaMode::midgap;
    double sigma_eV = 0.0;     // used when sigma_mode == explicit_value
    int n_states = 4;
    double tol_eV = 1e-7;
    int max_iterations = 3000;
    std::uint64_t seed = 0x5eed;
    bool verbose = false;
};

/// Shift placement from the bulk band edges of the dot and buffer binaries.
double place_sigma(const TbParameterSet& params, const std::string& dot_material,
                   const std::string& buffer_material, SigmaMode mode,
                   double explicit_value);

struct ConductionStates {
    std::vector<WaveFunction> states;  // ascending |E - sigma|
    double sigma_eV = 0.0;
    int iterations = 0;
    bool valence_like = false;  // lowest state has s character < 0.5
};

/// Interior eigenstates of H nearest sigma, as WaveFunctions.  Throws
/// ConvergenceError when residuals cannot be brought under tol.
ConductionStates solve_ground_conduction(const BlockSparseMatrix& H, double sigma,
                                         int k, double tol, std::uint64_t seed,
                                         int max_iterations = 3000,
                                         bool verbose = false);

/// Ground conduction state: lowest eigenvalue at or above sigma, falling
/// back to the state nearest sigma.  Returns the index into states.
std::size_t pick_ground_state(const ConductionStates& cs);

/// Binary amplitude dump plus JSON sidecar (tier, ordering, eigenvalue,
/// residual); bit-exact round trip.
void export_wavefunction(const WaveFunction& wf, const std::string& data_path,
                         const std::string& meta_path);
WaveFunction import_wavefunction(const std::string& data_path,
                                 const std::string& meta_path);

} // namespace dotspin::electronic
