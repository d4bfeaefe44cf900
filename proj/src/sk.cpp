// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include "dotspin/sk.hpp"

#include <cmath>

namespace dotspin::electronic {

BasisTier tier_from_string(const std::string& s) {
    if (s == "s") return BasisTier::s_only;
    if (s == "sp3s*" || s == "sp3s") return BasisTier::sp3s;
    if (s == "sp3d5s*" || s == "sp3d5s") return BasisTier::sp3d5s;
    throw InputError("unknown basis tier '" + s + "'");
}

const char* to_string(BasisTier t) {
    switch (t) {
        case BasisTier::s_only: return "s";
        case BasisTier::sp3s: return "sp3s*";
        case BasisTier::sp3d5s: return "sp3d5s*";
    }
    return "?";
}

int orbital_count(BasisTier t) {
    switch (t) {
        case BasisTier::s_only: return 1;
        case BasisTier::sp3s: return 5;
        case BasisTier::sp3d5s: return 10;
    }
    return 0;
}

int sstar_index(BasisTier t) {
    switch (t) {
        case BasisTier::s_only: return -1;
        case BasisTier::sp3s: return 4;
        case BasisTier::sp3d5s: return 9;
    }
    return -1;
}

TwoCenterIntegrals TwoCenterIntegrals::reversed() const {
    TwoCenterIntegrals r = *this;
    std::swap(r.sp_sigma, r.ps_sigma);
    std::swap(r.s_sstar_sigma, r.sstar_s_sigma);
    std::swap(r.sstar_p_sigma, r.p_sstar_sigma);
    std::swap(r.sd_sigma, r.ds_sigma);
    std::swap(r.pd_sigma, r.dp_sigma);
    std::swap(r.pd_pi, r.dp_pi);
    std::swap(r.sstar_d_sigma, r.d_sstar_sigma);
    return r;
}

namespace {

// orbital slots in the 10-orbital layout
enum { S = 0, PX = 1, PY = 2, PZ = 3, DXY = 4, DYZ = 5, DZX = 6, DX2 = 7, DZ2 = 8, SS = 9 };

// s-d row: (s on 1, d on 2)
void fill_sd_row(double* e, int row_stride, int srow, int dcol0, double l, double m,
                 double n, double v) {
    const double rt3 = std::sqrt(3.0);
    double* r = e + srow * row_stride;
    r[dcol0 + 0] = rt3 * l * m * v;
    r[dcol0 + 1] = rt3 * m * n * v;
    r[dcol0 + 2] = rt3 * n * l * v;
    r[dcol0 + 3] = 0.5 * rt3 * (l * l - m * m) * v;
    r[dcol0 + 4] = (n * n - 0.5 * (l * l + m * m)) * v;
}

// p-d rows: (p on 1, d on 2)
void fill_pd_rows(double* e, int row_stride, int prow0, int dcol0, double l, double m,
                  double n, double vs, double vp) {
    const double rt3 = std::sqrt(3.0);
    const double l2 = l * l, m2 = m * m, n2 = n * n;

    auto at = [&](int p, int d) -> double& { return e[(prow0 + p) * row_stride + dcol0 + d]; };

    // px row
    at(0, 0) = rt3 * l2 * m * vs + m * (1 - 2 * l2) * vp;              // x,xy
    at(0, 1) = rt3 * l * m * n * vs - 2 * l * m * n * vp;              // x,yz
    at(0, 2) = rt3 * l2 * n * vs + n * (1 - 2 * l2) * vp;              // x,zx
    at(0, 3) = 0.5 * rt3 * l * (l2 - m2) * vs + l * (1 - l2 + m2) * vp;// x,x2-y2
    at(0, 4) = l * (n2 - 0.5 * (l2 + m2)) * vs - rt3 * l * n2 * vp;    // x,z2
    // py row
    at(1, 0) = rt3 * m2 * l * vs + l * (1 - 2 * m2) * vp;              // y,xy
    at(1, 1) = rt3 * m2 * n * vs + n * (1 - 2 * m2) * vp;              // y,yz
    at(1, 2) = rt3 * l * m * n * vs - 2 * l * m * n * vp;              // y,zx
    at(1, 3) = 0.5 * rt3 * m * (l2 - m2) * vs - m * (1 + l2 - m2) * vp;// y,x2-y2
    at(1, 4) = m * (n2 - 0.5 * (l2 + m2)) * vs - rt3 * m * n2 * vp;    // y,z2
    // pz row
    at(2, 0) = rt3 * l * m * n * vs - 2 * l * m * n * vp;              // z,xy
    at(2, 1) = rt3 * n2 * m * vs + m * (1 - 2 * n2) * vp;              // z,yz
    at(2, 2) = rt3 * n2 * l * vs + l * (1 - 2 * n2) * vp;              // z,zx
    at(2, 3) = 0.5 * rt3 * n * (l2 - m2) * vs - n * (l2 - m2) * vp;    // z,x2-y2
    at(2, 4) = n * (n2 - 0.5 * (l2 + m2)) * vs + rt3 * n * (l2 + m2) * vp; // z,z2
}

} // namespace

std::array<double, 100> slater_koster_block(double l, double m, double n,
                                            const TwoCenterIntegrals& v, BasisTier tier) {
    if (std::abs(l * l + m * m + n * n - 1.0) > 1e-12) {
        throw InputError("slater_koster_block: direction cosines are not normalized");
    }
    // build in the full 10-orbital layout, compact at the end
    std::array<double, 100> e{};
    const int stride = 10;
    const int istar = SS;

    auto at = [&](int a, int b) -> double& { return e[a * stride + b]; };

    auto compact = [&](void) -> std::array<double, 100> {
        if (tier == BasisTier::sp3d5s) return e;
        std::array<double, 100> out{};
        if (tier == BasisTier::s_only) {
            out[0] = e[0];
            return out;
        }
        const int map[5] = {S, PX, PY, PZ, SS};
        for (int a = 0; a < 5; ++a) {
            for (int b = 0; b < 5; ++b) {
                out[a * 5 + b] = e[map[a] * stride + map[b]];
            }
        }
        return out;
    };

    // s-s
    at(S, S) = v.ss_sigma;
    if (tier == BasisTier::s_only) return compact();

    const double d[3] = {l, m, n};

    // s-p / p-s
    for (int p = 0; p < 3; ++p) {
        at(S, PX + p) = d[p] * v.sp_sigma;
        at(PX + p, S) = -d[p] * v.ps_sigma;
    }
    // p-p
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            at(PX + a, PX + b) = (a == b)
                ? d[a] * d[a] * v.pp_sigma + (1 - d[a] * d[a]) * v.pp_pi
                : d[a] * d[b] * (v.pp_sigma - v.pp_pi);
        }
    }
    // s* rows/columns (s* behaves as an s orbital)
    at(istar, istar) = v.sstar_sstar_sigma;
    at(S, istar) = v.s_sstar_sigma;
    at(istar, S) = v.sstar_s_sigma;
    for (int p = 0; p < 3; ++p) {
        at(istar, PX + p) = d[p] * v.sstar_p_sigma;
        at(PX + p, istar) = -d[p] * v.p_sstar_sigma;
    }

    if (tier == BasisTier::sp3s) return compact();

    const double rt3 = std::sqrt(3.0);
    const double l2 = l * l, m2 = m * m, n2 = n * n;

    // s-d / d-s / s*-d / d-s*  (even parity: same table both ways)
    fill_sd_row(e.data(), stride, S, DXY, l, m, n, v.sd_sigma);
    fill_sd_row(e.data(), stride, SS, DXY, l, m, n, v.sstar_d_sigma);
    {
        std::array<double, 100> tmp{};
        fill_sd_row(tmp.data(), stride, S, DXY, l, m, n, 1.0);
        for (int dd = 0; dd < 5; ++dd) {
            at(DXY + dd, S) = tmp[S * stride + DXY + dd] * v.ds_sigma;
            at(DXY + dd, SS) = tmp[S * stride + DXY + dd] * v.d_sstar_sigma;
        }
    }

    // p-d and d-p (odd parity: sign flips on transpose)
    fill_pd_rows(e.data(), stride, PX, DXY, l, m, n, v.pd_sigma, v.pd_pi);
    {
        std::array<double, 100> tmp{};
        fill_pd_rows(tmp.data(), stride, PX, DXY, l, m, n, v.dp_sigma, v.dp_pi);
        for (int p = 0; p < 3; ++p) {
            for (int dd = 0; dd < 5; ++dd) {
                at(DXY + dd, PX + p) = -tmp[(PX + p) * stride + DXY + dd];
            }
        }
    }

    // d-d
    const double vs = v.dd_sigma, vp = v.dd_pi, vd = v.dd_delta;
    at(DXY, DXY) = 3 * l2 * m2 * vs + (l2 + m2 - 4 * l2 * m2) * vp + (n2 + l2 * m2) * vd;
    at(DYZ, DYZ) = 3 * m2 * n2 * vs + (m2 + n2 - 4 * m2 * n2) * vp + (l2 + m2 * n2) * vd;
    at(DZX, DZX) = 3 * n2 * l2 * vs + (n2 + l2 - 4 * n2 * l2) * vp + (m2 + n2 * l2) * vd;
    at(DXY, DYZ) = 3 * l * m2 * n * vs + l * n * (1 - 4 * m2) * vp + l * n * (m2 - 1) * vd;
    at(DXY, DZX) = 3 * l2 * m * n * vs + m * n * (1 - 4 * l2) * vp + m * n * (l2 - 1) * vd;
    at(DYZ, DZX) = 3 * l * m * n2 * vs + l * m * (1 - 4 * n2) * vp + l * m * (n2 - 1) * vd;
    at(DYZ, DXY) = at(DXY, DYZ);
    at(DZX, DXY) = at(DXY, DZX);
    at(DZX, DYZ) = at(DYZ, DZX);

    const double lm2 = l2 - m2;
    at(DXY, DX2) = 1.5 * l * m * lm2 * vs + 2 * l * m * (m2 - l2) * vp + 0.5 * l * m * lm2 * vd;
    at(DYZ, DX2) = 1.5 * m * n * lm2 * vs - m * n * (1 + 2 * lm2) * vp + m * n * (1 + 0.5 * lm2) * vd;
    at(DZX, DX2) = 1.5 * n * l * lm2 * vs + n * l * (1 - 2 * lm2) * vp - n * l * (1 - 0.5 * lm2) * vd;
    at(DX2, DXY) = at(DXY, DX2);
    at(DX2, DYZ) = at(DYZ, DX2);
    at(DX2, DZX) = at(DZX, DX2);

    const double zz = n2 - 0.5 * (l2 + m2);
    at(DXY, DZ2) = rt3 * (l * m * zz * vs - 2 * l * m * n2 * vp + 0.5 * l * m * (1 + n2) * vd);
    at(DYZ, DZ2) = rt3 * (m * n * zz * vs + m * n * (l2 + m2 - n2) * vp - 0.5 * m * n * (l2 + m2) * vd);
    at(DZX, DZ2) = rt3 * (n * l * zz * vs + n * l * (l2 + m2 - n2) * vp - 0.5 * n * l * (l2 + m2) * vd);
    at(DZ2, DXY) = at(DXY, DZ2);
    at(DZ2, DYZ) = at(DYZ, DZ2);
    at(DZ2, DZX) = at(DZX, DZ2);

    at(DX2, DX2) = 0.75 * lm2 * lm2 * vs + (l2 + m2 - lm2 * lm2) * vp + (n2 + 0.25 * lm2 * lm2) * vd;
    at(DX2, DZ2) = rt3 * (0.5 * lm2 * zz * vs + n2 * (m2 - l2) * vp + 0.25 * (1 + n2) * lm2 * vd);
    at(DZ2, DX2) = at(DX2, DZ2);
    at(DZ2, DZ2) = zz * zz * vs + 3 * n2 * (l2 + m2) * vp + 0.75 * (l2 + m2) * (l2 + m2) * vd;

    return compact();
}

double strain_scale(double integral, double d0, double d, double eta) {
    if (d <= 0.0) throw InputError("strain_scale: bond length must be positive");
    if (eta == 0.0) return integral;
    return integral * std::pow(d0 / d, eta);
}

} // namespace dotspin::electronic
