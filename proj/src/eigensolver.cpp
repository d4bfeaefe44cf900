// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include "dotspin/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <Eigen/Dense>

#ifdef _OPENMP
#include <omp.h>
#else
static inline int omp_get_max_threads() { return 1; }
static inline int omp_get_thread_num() { return 0; }
#endif

#include "dotspin/rng.hpp"

namespace dotspin::electronic {

namespace {

// Column-major multivector; all heavy loops are OpenMP static so results
// are reproducible for a fixed thread count.
struct MV {
    std::int64_t n = 0;
    int cols = 0;
    std::vector<double> a;

    void resize(std::int64_t n_, int c) {
        n = n_;
        cols = c;
        a.assign(static_cast<std::size_t>(n) * c, 0.0);
    }
    double* col(int j) { return a.data() + static_cast<std::size_t>(j) * n; }
    const double* col(int j) const { return a.data() + static_cast<std::size_t>(j) * n; }
};

double dot(const double* x, const double* y, std::int64_t n) {
    double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s)
    for (std::int64_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::int64_t n) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal(double alpha, double* x, std::int64_t n) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) x[i] *= alpha;
}

/// dst(n x k) = sum over blocks of src_b (n x m_b) * coef_b (m_b x k);
/// coef row-major with leading dimension k.
void combine(const std::vector<const MV*>& parts,
             const Eigen::MatrixXd& coef, MV& dst) {
    const std::int64_t n = dst.n;
    const int k = dst.cols;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        double acc[64];  // k <= 3 * block_size, comfortably below 64
        for (int j = 0; j < k; ++j) acc[j] = 0.0;
        int row0 = 0;
        for (const MV* p : parts) {
            for (int c = 0; c < p->cols; ++c) {
                const double v = p->a[static_cast<std::size_t>(c) * n + i];
                const double* crow = coef.data() + (row0 + c);  // column-major Eigen
                for (int j = 0; j < k; ++j) {
                    acc[j] += v * crow[static_cast<std::size_t>(j) * coef.rows()];
                }
            }
            row0 += p->cols;
        }
        for (int j = 0; j < k; ++j) dst.a[static_cast<std::size_t>(j) * n + i] = acc[j];
    }
}

/// Modified Gram-Schmidt of V against fixed blocks then internally.  Every
/// column operation on V is mirrored onto V's followers; projections
/// against a fixed block are mirrored using that block's own followers
/// (so H*V / F*V images stay consistent).  Collapsed columns are dropped;
/// returns the surviving count.
int mgs(MV& v, std::vector<MV*> followers, const std::vector<const MV*>& against,
        const std::vector<std::vector<const MV*>>& against_followers = {}) {
    const std::int64_t n = v.n;
    const bool track_against = !against_followers.empty();
    int kept = 0;
    for (int j = 0; j < v.cols; ++j) {
        double* vj = v.col(j);
        std::vector<double*> fj;
        for (MV* f : followers) fj.push_back(f->col(j));

        const double norm0 = std::sqrt(dot(vj, vj, n));
        if (norm0 == 0.0) continue;

        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t bk = 0; bk < against.size(); ++bk) {
                const MV* blk = against[bk];
                for (int c = 0; c < blk->cols; ++c) {
                    const double h = dot(blk->col(c), vj, n);
                    if (h == 0.0) continue;
                    axpy(-h, blk->col(c), vj, n);
                    if (track_against) {
                        for (std::size_t f = 0; f < followers.size(); ++f) {
                            axpy(-h, against_followers[f][bk]->col(c), fj[f], n);
                        }
                    }
                }
            }
            for (int c = 0; c < kept; ++c) {
                const double h = dot(v.col(c), vj, n);
                if (h == 0.0) continue;
                axpy(-h, v.col(c), vj, n);
                for (std::size_t f = 0; f < followers.size(); ++f) {
                    axpy(-h, followers[f]->col(c), fj[f], n);
                }
            }
        }
        const double norm1 = std::sqrt(dot(vj, vj, n));
        if (norm1 < 1e-10 * norm0 || norm1 == 0.0) continue;  // drop column
        scal(1.0 / norm1, vj, n);
        for (std::size_t f = 0; f < followers.size(); ++f) {
            scal(1.0 / norm1, fj[f], n);
        }
        if (kept != j) {
            std::copy(vj, vj + n, v.col(kept));
            for (std::size_t f = 0; f < followers.size(); ++f) {
                std::copy(fj[f], fj[f] + n, followers[f]->col(kept));
            }
        }
        ++kept;
    }
    return kept;
}

/// V -= B * G (and the same combination applied to each follower pair),
/// one pass over rows.
void subtract_projection(MV& v, const MV& basis, const Eigen::MatrixXd& g,
                         std::vector<MV*> v_followers = {},
                         std::vector<const MV*> b_followers = {}) {
    const std::int64_t n = v.n;
    if (basis.cols == 0 || v.cols == 0) return;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        double bv[64];
        for (int c = 0; c < basis.cols; ++c) {
            bv[c] = basis.a[static_cast<std::size_t>(c) * n + i];
        }
        for (int j = 0; j < v.cols; ++j) {
            double acc = 0.0;
            for (int c = 0; c < basis.cols; ++c) acc += bv[c] * g(c, j);
            v.a[static_cast<std::size_t>(j) * n + i] -= acc;
        }
        for (std::size_t f = 0; f < v_followers.size(); ++f) {
            for (int c = 0; c < basis.cols; ++c) {
                bv[c] = b_followers[f]->a[static_cast<std::size_t>(c) * n + i];
            }
            for (int j = 0; j < v.cols; ++j) {
                double acc = 0.0;
                for (int c = 0; c < basis.cols; ++c) acc += bv[c] * g(c, j);
                v_followers[f]->a[static_cast<std::size_t>(j) * n + i] -= acc;
            }
        }
    }
}

/// G(ma x mb) = [A parts]^T [B parts], single pass over rows with
/// deterministic thread-ordered reduction.
Eigen::MatrixXd gram(const std::vector<const MV*>& aparts,
                     const std::vector<const MV*>& bparts, std::int64_t n) {
    int ma = 0, mb = 0;
    for (const MV* p : aparts) ma += p->cols;
    for (const MV* p : bparts) mb += p->cols;
    const int nthreads = omp_get_max_threads();
    std::vector<Eigen::MatrixXd> partial(nthreads, Eigen::MatrixXd::Zero(ma, mb));

#pragma omp parallel num_threads(nthreads)
    {
        const int tid = omp_get_thread_num();
        Eigen::MatrixXd& acc = partial[tid];
        double av[64], bv[64];
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            int k = 0;
            for (const MV* p : aparts) {
                for (int c = 0; c < p->cols; ++c) {
                    av[k++] = p->a[static_cast<std::size_t>(c) * n + i];
                }
            }
            k = 0;
            for (const MV* p : bparts) {
                for (int c = 0; c < p->cols; ++c) {
                    bv[k++] = p->a[static_cast<std::size_t>(c) * n + i];
                }
            }
            for (int a = 0; a < ma; ++a) {
                for (int b = 0; b < mb; ++b) {
                    acc(a, b) += av[a] * bv[b];
                }
            }
        }
    }
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(ma, mb);
    for (int t = 0; t < nthreads; ++t) g += partial[t];
    return g;
}

/// Block-Jacobi preconditioner for (H - sigma)^2: per-site inverse of
/// (D - sigma)^2 + sum_j B_j B_j^T.
class FoldedJacobi {
public:
    FoldedJacobi(const BlockSparseMatrix& h, double sigma) : nb_(h.norb) {
        const int nb = nb_;
        inv_.resize(static_cast<std::size_t>(h.nsites) * nb * nb);
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < h.nsites; ++i) {
            Eigen::MatrixXd f = Eigen::MatrixXd::Zero(nb, nb);
            for (std::int32_t k = h.row_ptr[i]; k < h.row_ptr[i + 1]; ++k) {
                Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                               Eigen::RowMajor>>
                    blk(h.val.data() + static_cast<std::int64_t>(k) * nb * nb, nb, nb);
                if (h.col[k] == i) {
                    Eigen::MatrixXd d = blk;
                    for (int a = 0; a < nb; ++a) d(a, a) -= sigma;
                    f += d * d.transpose();
                } else {
                    f += blk * blk.transpose();
                }
            }
            const double ridge = 1e-12 * (1.0 + f.trace());
            for (int a = 0; a < nb; ++a) f(a, a) += ridge;
            Eigen::MatrixXd finv = f.ldlt().solve(Eigen::MatrixXd::Identity(nb, nb));
            for (int a = 0; a < nb; ++a) {
                for (int b = 0; b < nb; ++b) {
                    inv_[(static_cast<std::size_t>(i) * nb + a) * nb + b] = finv(a, b);
                }
            }
        }
    }

    void apply(const double* r, double* w, std::int64_t nsites) const {
        const int nb = nb_;
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < nsites; ++i) {
            const double* m = inv_.data() + static_cast<std::size_t>(i) * nb * nb;
            const double* ri = r + i * nb;
            double* wi = w + i * nb;
            for (int a = 0; a < nb; ++a) {
                double acc = 0.0;
                for (int b = 0; b < nb; ++b) acc += m[a * nb + b] * ri[b];
                wi[a] = acc;
            }
        }
    }

private:
    int nb_;
    std::vector<double> inv_;
};

} // namespace

FoldedSolveResult solve_folded(const BlockSparseMatrix& H, double sigma,
                               const FoldedSolveOptions& opt) {
    const std::int64_t n = H.dim();
    if (opt.nev < 1) throw InputError("solve_folded: nev must be >= 1");
    if (opt.tol_eV <= 0) throw InputError("solve_folded: tolerance must be positive");
    const int b = std::min<std::int64_t>(opt.nev + opt.block_extra, std::max<std::int64_t>(1, n / 3));
    if (b < opt.nev) {
        throw InputError("solve_folded: problem too small for requested state count");
    }

    FoldedJacobi prec(H, sigma);

    // workspace: X / W / P with H- and F-images kept in lockstep
    MV X, HX, FX, W, HW, FW, P, HP, FP, tmp;
    X.resize(n, b);

    rng::Counter rand(opt.seed, 0xe16e);
    for (int j = 0; j < b; ++j) {
        double* xj = X.col(j);
        for (std::int64_t i = 0; i < n; ++i) xj[i] = rand.next_gaussian();
    }
    mgs(X, {}, {});

    MV Ytmp;
    auto apply_both = [&](const MV& V, MV& HV, MV& FV) {
        HV.resize(n, V.cols);
        FV.resize(n, V.cols);
        if (V.cols == 0) return;
        Ytmp.resize(n, V.cols);
        H.apply_shifted_mv(V.a.data(), Ytmp.a.data(), sigma, V.cols);  // (H-s)V
        H.apply_shifted_mv(Ytmp.a.data(), FV.a.data(), sigma, V.cols); // (H-s)^2 V
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n * V.cols; ++i) {
            HV.a[i] = Ytmp.a[i] + sigma * V.a[i];
        }
    };

    apply_both(X, HX, FX);

    FoldedSolveResult res;
    std::vector<double> theta(b, 0.0), rnorm(b, 0.0);
    int it = 0;
    bool all_ok = false;

    for (; it < opt.max_iterations; ++it) {
        // F-Ritz values drive the update; convergence is judged on the
        // Rayleigh-Ritz eigenpairs of H within span(X), computed from small
        // Gram matrices (separates folded near-degeneracies).
        std::vector<double> thetaF(b);
        for (int j = 0; j < b; ++j) {
            thetaF[j] = dot(X.col(j), FX.col(j), n);
        }
        {
            Eigen::MatrixXd A = gram({&X}, {&HX}, n);
            Eigen::MatrixXd B2 = gram({&HX}, {&HX}, n);
            A = 0.5 * (A + A.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(A);
            const Eigen::MatrixXd R2 =
                rr.eigenvectors().transpose() * B2 * rr.eigenvectors();
            std::vector<int> sel(b);
            std::iota(sel.begin(), sel.end(), 0);
            std::stable_sort(sel.begin(), sel.end(), [&](int a, int c) {
                return std::abs(rr.eigenvalues()(a) - sigma) <
                       std::abs(rr.eigenvalues()(c) - sigma);
            });
            all_ok = true;
            for (int j = 0; j < b; ++j) {
                const int col = sel[j];
                const double th = rr.eigenvalues()(col);
                rnorm[j] = std::sqrt(std::max(0.0, R2(col, col) - th * th));
                theta[j] = th;
                if (j < opt.nev && rnorm[j] > 0.5 * opt.tol_eV) all_ok = false;
            }
        }
        if (opt.verbose && it % 20 == 0) {
            std::fprintf(stderr, "[eig] it %4d  E0 %.6f  res %.2e\n", it, theta[0],
                         *std::max_element(rnorm.begin(), rnorm.begin() + opt.nev));
        }
        if (all_ok) {
            // the small-matrix estimate bottoms out near sqrt(eps)*|theta|;
            // verify with freshly applied operators on the rotated basis
            Eigen::MatrixXd A = gram({&X}, {&HX}, n);
            A = 0.5 * (A + A.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(A);
            tmp.resize(n, b);
            combine({&X}, rr.eigenvectors(), tmp);
            X = tmp;
            mgs(X, {}, {});
            apply_both(X, HX, FX);
            std::vector<int> sel(b);
            std::iota(sel.begin(), sel.end(), 0);
            std::stable_sort(sel.begin(), sel.end(), [&](int a, int c) {
                return std::abs(rr.eigenvalues()(a) - sigma) <
                       std::abs(rr.eigenvalues()(c) - sigma);
            });
            bool verified = true;
            for (int j = 0; j < opt.nev; ++j) {
                const int col = sel[j];
                const double th = dot(X.col(col), HX.col(col), n);
                double ss = 0.0;
                const double* xj = X.col(col);
                const double* hj = HX.col(col);
#pragma omp parallel for schedule(static) reduction(+ : ss)
                for (std::int64_t i = 0; i < n; ++i) {
                    const double rv = hj[i] - th * xj[i];
                    ss += rv * rv;
                }
                if (std::sqrt(ss) > opt.tol_eV) verified = false;
            }
            if (verified) break;
            // rebase P on the rotated X and keep iterating
            if (P.cols > 0) {
                subtract_projection(P, X, gram({&X}, {&P}, n));
                const int bp3 = mgs(P, {}, {});
                P.cols = bp3;
                P.a.resize(static_cast<std::size_t>(n) * bp3);
                apply_both(P, HP, FP);
            }
            continue;
        }

        // preconditioned F-residual block, high spectrum filtered away
        W.resize(n, b);
        std::vector<double> r(static_cast<std::size_t>(n));
        for (int j = 0; j < b; ++j) {
            const double* xj = X.col(j);
            const double* fj = FX.col(j);
#pragma omp parallel for schedule(static)
            for (std::int64_t i = 0; i < n; ++i) r[i] = fj[i] - thetaF[j] * xj[i];
            prec.apply(r.data(), W.col(j), H.nsites);
        }
        for (int pass = 0; pass < 2; ++pass) {
            subtract_projection(W, X, gram({&X}, {&W}, n));
            if (P.cols > 0) subtract_projection(W, P, gram({&P}, {&W}, n));
        }
        const int bw = mgs(W, {}, {});
        W.cols = bw;
        W.a.resize(static_cast<std::size_t>(n) * bw);
        if (bw == 0) break;  // stagnated: subspace fully converged numerically
        apply_both(W, HW, FW);

        std::vector<const MV*> parts = {&X, &W};
        std::vector<const MV*> fparts = {&FX, &FW};
        std::vector<const MV*> hparts = {&HX, &HW};
        if (P.cols > 0) {
            parts.push_back(&P);
            fparts.push_back(&FP);
            hparts.push_back(&HP);
        }
        Eigen::MatrixXd T = gram(parts, fparts, n);
        T = 0.5 * (T + T.transpose()).eval();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        Eigen::MatrixXd C = es.eigenvectors().leftCols(b);

        tmp.resize(n, b);
        combine(parts, C, tmp);
        MV Xn = tmp;
        combine(hparts, C, tmp);
        MV HXn = tmp;
        combine(fparts, C, tmp);
        MV FXn = tmp;

        // next P: the W/P contribution to the new X
        Eigen::MatrixXd Cp = C;
        Cp.topRows(b).setZero();
        MV Pn, HPn, FPn;
        Pn.resize(n, b);
        combine(parts, Cp, Pn);
        HPn.resize(n, b);
        combine(hparts, Cp, HPn);
        FPn.resize(n, b);
        combine(fparts, Cp, FPn);

        X = std::move(Xn);
        HX = std::move(HXn);
        FX = std::move(FXn);

        for (int pass = 0; pass < 2; ++pass) {
            subtract_projection(Pn, X, gram({&X}, {&Pn}, n), {&HPn, &FPn},
                                {&HX, &FX});
        }
        const int bp = mgs(Pn, {&HPn, &FPn}, {});
        Pn.cols = bp;
        Pn.a.resize(static_cast<std::size_t>(n) * bp);
        HPn.cols = bp;
        HPn.a.resize(static_cast<std::size_t>(n) * bp);
        FPn.cols = bp;
        FPn.a.resize(static_cast<std::size_t>(n) * bp);
        P = std::move(Pn);
        HP = std::move(HPn);
        FP = std::move(FPn);

        // drift control: refresh operator images from scratch occasionally
        if ((it + 1) % 40 == 0) {
            mgs(X, {}, {});
            apply_both(X, HX, FX);
            subtract_projection(P, X, gram({&X}, {&P}, n));
            const int bp2 = mgs(P, {}, {});
            P.cols = bp2;
            P.a.resize(static_cast<std::size_t>(n) * bp2);
            apply_both(P, HP, FP);
        }
    }

    // final Rayleigh-Ritz in H on span(X) separates any +/- folded mixing;
    // images are recomputed so the rotation works on drift-free data
    mgs(X, {}, {});
    apply_both(X, HX, FX);
    {
        Eigen::MatrixXd A(b, b);
        for (int a = 0; a < b; ++a) {
            for (int c = 0; c < b; ++c) {
                A(a, c) = dot(X.col(a), HX.col(c), n);
            }
        }
        A = 0.5 * (A + A.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        Eigen::MatrixXd C = es.eigenvectors();
        tmp.resize(n, b);
        combine({&X}, C, tmp);
        X = tmp;
        combine({&HX}, C, tmp);
        HX = tmp;
        theta.assign(es.eigenvalues().data(), es.eigenvalues().data() + b);
    }

    // order by distance from the shift
    std::vector<int> order(b);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int c) {
        return std::abs(theta[a] - sigma) < std::abs(theta[c] - sigma);
    });

    res.iterations = it;
    for (int jj = 0; jj < opt.nev; ++jj) {
        const int j = order[jj];
        const double* xj = X.col(j);
        double nrm = std::sqrt(dot(xj, xj, n));
        std::vector<double> v(xj, xj + n);
        if (nrm > 0) for (auto& x : v) x /= nrm;

        // fresh residual for the reported pair
        std::vector<double> hv(static_cast<std::size_t>(n));
        H.apply_shifted(v.data(), hv.data(), 0.0);
        const double th = dot(v.data(), hv.data(), n);
        double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s)
        for (std::int64_t i = 0; i < n; ++i) {
            const double rr = hv[i] - th * v[i];
            s += rr * rr;
        }
        res.eigenvalues_eV.push_back(th);
        res.residuals.push_back(std::sqrt(s));
        res.vectors.push_back(std::move(v));
    }
    res.converged = true;
    for (int j = 0; j < opt.nev; ++j) {
        if (res.residuals[j] > opt.tol_eV) res.converged = false;
    }
    return res;
}

} // namespace dotspin::electronic
