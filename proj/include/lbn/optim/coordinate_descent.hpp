// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include "lbn/objective.hpp"
#include "lbn/optim/step_sizes.hpp"

namespace lbn {

struct CdOptions {
    int theta_iters = 500;
    double theta_tol = 1e-12;  // on the gradient norm, relative to parameter norm
    int x_iters = 200;
    double x_tol = 1e-12;      // on the iterate move
};

namespace detail {

/// Inner solver for one Theta-block sub-problem (convex, smooth): gradient
/// descent with the 1/L step from the spectral norm of the bias-augmented
/// input matrix, which guarantees monotone descent.
inline void cd_solve_theta(Network& net, const ObjectiveSpec& spec, const Mat& X0, const Mat& Y,
                           const AuxVars& aux, std::size_t l, const CdOptions& opt) {
    Layer& ly = net.layers[l - 1];
    const Mat& prev = (l == 1) ? X0 : aux.x[l - 2];
    const Mat& xl = (l < net.depth()) ? aux.x[l - 1] : Y;
    const double n = static_cast<double>(X0.cols());
    double lam = (l < net.depth()) ? spec.lambda_of(l) : 1.0;

    Mat aug(prev.rows() + 1, prev.cols());
    aug.topRows(prev.rows()) = prev;
    aug.bottomRows(1).setOnes();
    double sn = spectral_norm(aug);
    double lip = lam * sn * sn / n;
    if (lip <= 0.0) return;
    double tau = 1.0 / lip;

    for (int it = 0; it < opt.theta_iters; ++it) {
        Mat Z = affine_batch(ly, prev);
        Mat P = prox_batch(ly.act, Z) - xl;
        Mat gW = (lam / n) * (prev * P.transpose());
        Vec gb = (lam / n) * P.rowwise().sum();
        double gnorm = std::sqrt(gW.squaredNorm() + gb.squaredNorm());
        if (gnorm <= opt.theta_tol * std::max(1.0, std::sqrt(ly.W.squaredNorm() + ly.b.squaredNorm())))
            break;
        ly.W.noalias() -= tau * gW;
        ly.b.noalias() -= tau * gb;
    }
}

/// Inner solver for one x_j-block sub-problem: per-sample proximal gradient
/// with the 1/L step (L = lambda_{j+1} ||W_{j+1}||^2), monotone by the
/// descent lemma.
inline void cd_solve_x(Network& net, const ObjectiveSpec& spec, const Mat& X0, const Mat& Y,
                       AuxVars& aux, std::size_t j, const CdOptions& opt) {
    const std::size_t L = net.depth();
    const Mat& prev = (j == 1) ? X0 : aux.x[j - 2];
    const Mat& xnext = (j + 1 < L) ? aux.x[j] : Y;
    const Layer& next = net.layers[j];
    double lam_next = (j + 1 < L) ? spec.lambda_of(j + 1) : 1.0;
    double lam = spec.lambda_of(j);

    Mat Fprev = affine_batch(net.layers[j - 1], prev);  // fixed during the block
    double wn = spectral_norm(next.W);
    double lip = lam_next * wn * wn;
    double tau = lip > 0.0 ? 1.0 / lip : 1.0;

    Mat& X = aux.x[j - 1];
    for (int it = 0; it < opt.x_iters; ++it) {
        Mat P = prox_batch(next.act, affine_batch(next, X)) - xnext;
        Mat G = lam_next * (next.W * P) - lam * Fprev;
        Mat V = X - tau * G;
        Mat Xn = prox_G_x(spec, net, j, V, tau);
        double move = (Xn - X).norm();
        X = std::move(Xn);
        if (move <= opt.x_tol * std::max(1.0, X.norm())) break;
    }
}

}  // namespace detail

/// One block coordinate-descent epoch: the Theta-block (every layer
/// independently), then the odd-x block, then the even-x block. Each block's
/// sub-problems are convex and solved to tolerance or iteration cap; the
/// objective is non-increasing per block.
inline void coordinate_descent_epoch(Network& net, const ObjectiveSpec& spec, const Mat& X0,
                                     const Mat& Y, AuxVars& aux, const CdOptions& opt = {}) {
    check_aux_shapes(net, aux, X0, Y);
    const std::size_t L = net.depth();
    for (std::size_t l = 1; l <= L; ++l) detail::cd_solve_theta(net, spec, X0, Y, aux, l, opt);
    for (std::size_t j = 1; j <= L - 1; j += 2) detail::cd_solve_x(net, spec, X0, Y, aux, j, opt);
    for (std::size_t j = 2; j <= L - 1; j += 2) detail::cd_solve_x(net, spec, X0, Y, aux, j, opt);
}

}  // namespace lbn
