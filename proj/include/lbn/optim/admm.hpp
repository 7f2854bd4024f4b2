// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include <Eigen/Cholesky>

#include "lbn/objective.hpp"

namespace lbn {

struct AdmmOptions {
    double delta = 1.0;   // augmented-Lagrangian weight
    double ridge = 0.0;   // tau, proximal ridge on W (0 = off)
    int iterations = 100; // J
};

struct AdmmTrace {
    std::vector<double> residual;  // ||z - f(x_{l-1}, Theta)||_F per iteration
};

namespace detail {

/// prox of (1/delta)(||.||^2/2 + Psi)* at Q via the extended Moreau
/// decomposition: Q - (1/delta) prox_{delta/(1+delta) Psi}(delta Q / (1+delta)).
inline Mat prox_conjugate(const ProxSpec& s, const Mat& Q, double delta) {
    Mat inner = prox_scaled_batch(s, (delta / (1.0 + delta)) * Q, delta / (1.0 + delta));
    return Q - inner / delta;
}

}  // namespace detail

/// ADMM solve of the layer-l Theta sub-problem (W/b/r/z/mu cycle) with the
/// targets x_l fixed. X_prev holds the layer inputs, X_tgt the layer-l
/// auxiliary variables (or labels for the final layer). A positive ridge adds
/// tau/2 ||W - W^j||^2 to the augmented Lagrangian, which keeps the weight
/// solve well defined for any sample count.
inline AdmmTrace admm_theta_block(Network& net, std::size_t l, const Mat& X_prev,
                                  const Mat& X_tgt, const AdmmOptions& opt) {
    if (l < 1 || l > net.depth()) throw std::invalid_argument("admm_theta_block: bad layer");
    Layer& ly = net.layers[l - 1];
    const double delta = opt.delta;
    const Index n = X_prev.cols();

    Mat gram = X_prev * X_prev.transpose();
    if (opt.ridge > 0.0) gram.diagonal().array() += opt.ridge / delta;
    Eigen::LLT<Mat> llt(gram);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error(
            "admm_theta_block: singular weight system; set a ridge tau > 0");

    Mat F = affine_batch(ly, X_prev);
    Mat Z = F;
    Mat Mu = Mat::Zero(F.rows(), F.cols());
    AdmmTrace trace;
    for (int j = 0; j < opt.iterations; ++j) {
        Mat T = Z + Mu / delta;  // f must match z + mu/delta at the optimum
        Mat rhs = X_prev * (T.colwise() - ly.b).transpose();
        if (opt.ridge > 0.0) rhs.noalias() += (opt.ridge / delta) * ly.W;
        ly.W = llt.solve(rhs);
        ly.b = (T - ly.W.transpose() * X_prev).rowwise().mean();
        F = affine_batch(ly, X_prev);
        Mat R = X_tgt - Mu + delta * F;
        Z = (R - prox_scaled_batch(ly.act, R / (1.0 + delta), delta / (1.0 + delta))) / delta;
        Mu.noalias() += delta * (Z - F);
        trace.residual.push_back((Z - F).norm());
    }
    (void)n;
    return trace;
}

/// ADMM solve of one x_j block sub-problem (x/v/z/mu cycle): the x-update is a
/// scaled prox of Psi_j, the v-update a linear solve with the always-SPD
/// matrix W_{j+1} W_{j+1}^T + I, and the z-update the prox of the conjugate
/// through the extended Moreau decomposition.
inline AdmmTrace admm_x_block(Network& net, std::size_t j, AuxVars& aux, const Mat& X0,
                              const Mat& Y, const AdmmOptions& opt) {
    const std::size_t L = net.depth();
    if (j < 1 || j >= L) throw std::invalid_argument("admm_x_block: bad index");
    const double delta = opt.delta;
    const Mat& prev = (j == 1) ? X0 : aux.x[j - 2];
    const Mat& xnext = (j + 1 < L) ? aux.x[j] : Y;
    const Layer& next = net.layers[j];

    Mat Fprev = affine_batch(net.layers[j - 1], prev);
    Mat gram = next.W * next.W.transpose();
    gram.diagonal().array() += 1.0;
    Eigen::LLT<Mat> llt(gram);
    if (llt.info() != Eigen::Success) {
        gram.diagonal().array() += 1e-10;  // ridge fallback, as in the Theta block
        llt.compute(gram);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("admm_x_block: v-solve failed");
    }

    Mat& X = aux.x[j - 1];
    Mat V = X;
    Mat Z = affine_batch(next, V);
    Mat Mu1 = Mat::Zero(Z.rows(), Z.cols());
    Mat Mu2 = Mat::Zero(X.rows(), X.cols());
    AdmmTrace trace;
    for (int it = 0; it < opt.iterations; ++it) {
        X = prox_scaled_batch(net.layers[j - 1].act,
                                      (delta * V + Mu2 + Fprev) / (1.0 + delta),
                                      1.0 / (1.0 + delta));
        Mat rhs = next.W * ((Z.colwise() - next.b) + Mu1 / delta) + X - Mu2 / delta;
        V = llt.solve(rhs);
        Mat Fv = affine_batch(next, V);
        Mat Q = Fv + (xnext - Mu1) / delta;
        Z = detail::prox_conjugate(next.act, Q, delta);
        Mu1.noalias() += delta * (Z - Fv);
        Mu2.noalias() += delta * (V - X);
        trace.residual.push_back(std::sqrt((Z - Fv).squaredNorm() + (V - X).squaredNorm()));
    }
    return trace;
}

}  // namespace lbn
