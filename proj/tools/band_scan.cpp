// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

// Band-path inspector for tight-binding parameter files: prints the bulk
// bands along L-Gamma-X for each material in the set, plus the Gamma edges
// and the conduction floor over the sweep.

#include <cstdio>
#include <string>

#include "dotspin/hamiltonian.hpp"

using namespace dotspin;
using namespace dotspin::electronic;

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <parameter-file> [samples]\n", argv[0]);
        return 1;
    }
    const auto params = TbParameterSet::load(argv[1]);
    const int samples = argc > 2 ? std::atoi(argv[2]) : 16;

    for (const auto& [name, mat] : params.materials) {
        const auto edges = bulk_band_edges(params, name);
        std::printf("# %s  vbm %.4f  cbm %.4f  conduction floor %.4f\n", name.c_str(),
                    edges.vbm_eV, edges.cbm_eV,
                    conduction_floor(params, name, samples));
        for (int i = -samples; i <= samples; ++i) {
            // L (-1) -> Gamma (0) -> X (+1)
            const double t = static_cast<double>(std::abs(i)) / samples;
            const Vec3 k = i < 0 ? Vec3{0.5 * t, 0.5 * t, 0.5 * t} : Vec3{t, 0, 0};
            const auto bands = bulk_bands_at(params, name, k);
            std::printf("%+.4f", static_cast<double>(i) / samples);
            for (double e : bands) std::printf(" %.4f", e);
            std::printf("\n");
        }
        std::printf("\n");
    }
    return 0;
}
