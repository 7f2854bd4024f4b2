// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include <stdexcept>
#include <vector>

#include "lbn/bregman.hpp"
#include "lbn/network.hpp"

namespace lbn {

enum class Task { Classification, Autoencoder, DenoisingAutoencoder };

/// Weights and regularisation of the lifted empirical risk
///
///   E(Theta, X) = (1/n) sum_i [ B_{Psi_L}(y^i, f(x_{L-1}^i, Theta_L))
///                 + sum_{l<L} lambda_l B_{Psi_l}(x_l^i, f(x_{l-1}^i, Theta_l))
///                 + alpha ||x_code^i||_1 ].
///
/// The final-layer potential Psi_L is the last layer's activation spec (the
/// Zero spec gives the squared-Euclidean data loss); the data term itself is
/// unweighted. For autoencoders the code sits at layer floor(L/2).
struct ObjectiveSpec {
    std::vector<double> lambda;  // penalty weights, lambda[l-1] for layer l; empty = all 1
    double code_l1 = 0.0;        // alpha
    int code_layer = 0;          // 1-based; 0 = none

    double lambda_of(std::size_t l) const {  // 1-based, data layer -> 1
        if (lambda.empty() || l > lambda.size()) return 1.0;
        return lambda[l - 1];
    }
    double code_alpha_for(std::size_t l) const {
        return (code_l1 > 0.0 && static_cast<int>(l) == code_layer) ? code_l1 : 0.0;
    }
};

inline void check_aux_shapes(const Network& net, const AuxVars& aux, const Mat& X0, const Mat& Y) {
    const std::size_t L = net.depth();
    if (aux.x.size() != L - 1) throw std::invalid_argument("aux: expected L-1 layers");
    if (X0.rows() != net.in_dim()) throw std::invalid_argument("batch input width mismatch");
    if (Y.rows() != net.out_dim()) throw std::invalid_argument("target width mismatch");
    if (Y.cols() != X0.cols()) throw std::invalid_argument("batch size mismatch");
    for (std::size_t j = 0; j + 1 < L; ++j) {
        if (aux.x[j].rows() != net.layers[j].out_dim() || aux.x[j].cols() != X0.cols())
            throw std::invalid_argument("aux shape mismatch at layer " + std::to_string(j + 1));
    }
}

/// E(Theta, X) over a batch; +inf if any auxiliary variable leaves dom(Psi)
/// (so prox steps and line searches can probe freely).
inline double objective_E(const ObjectiveSpec& spec, const Network& net, const AuxVars& aux,
                          const Mat& X0, const Mat& Y) {
    check_aux_shapes(net, aux, X0, Y);
    const std::size_t L = net.depth();
    const Index n = X0.cols();
    double total = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        const Mat& prev = (l == 0) ? X0 : aux.x[l - 1];
        const Mat& xl = (l + 1 < L) ? aux.x[l] : Y;
        Mat Z = affine_batch(net.layers[l], prev);
        BregmanLoss loss{net.layers[l].act, BregmanEvalMode::Generic};
        double lam = (l + 1 < L) ? spec.lambda_of(l + 1) : 1.0;
        for (Index i = 0; i < n; ++i) {
            double b = bregman_eval(loss, xl.col(i), Z.col(i));
            if (b == kInf) return kInf;
            total += lam * b;
        }
    }
    if (spec.code_l1 > 0.0 && spec.code_layer >= 1) {
        total += spec.code_l1 * aux.x[spec.code_layer - 1].array().abs().sum();
    }
    return total / static_cast<double>(n);
}

/// Gradient of the smooth part H with respect to Theta_l (1-based), batch
/// averaged: dW = (lambda_l/n) x_{l-1} (sigma(z_l) - x_l)^T, db likewise.
/// No derivative of the activation appears anywhere.
inline std::pair<Mat, Vec> grad_H_theta(const ObjectiveSpec& spec, const Network& net,
                                        const AuxVars& aux, const Mat& X0, const Mat& Y,
                                        std::size_t l) {
    const std::size_t L = net.depth();
    if (l < 1 || l > L) throw std::invalid_argument("grad_H_theta: layer index out of range");
    check_aux_shapes(net, aux, X0, Y);
    const Mat& prev = (l == 1) ? X0 : aux.x[l - 2];
    const Mat& xl = (l < L) ? aux.x[l - 1] : Y;
    Mat Z = affine_batch(net.layers[l - 1], prev);
    Mat P = prox_batch(net.layers[l - 1].act, Z) - xl;
    double lam = (l < L) ? spec.lambda_of(l) : 1.0;
    double scale = lam / static_cast<double>(X0.cols());
    Mat dW = scale * (prev * P.transpose());
    Vec db = scale * P.rowwise().sum();
    return {std::move(dW), std::move(db)};
}

/// Per-sample gradient of the smooth part H with respect to x_j (1-based,
/// 1 <= j <= L-1), one column per sample:
///   lambda_{j+1} W_{j+1} (sigma(f(x_j, Theta_{j+1})) - x_{j+1}) - lambda_j f(x_{j-1}, Theta_j).
inline Mat grad_H_x(const ObjectiveSpec& spec, const Network& net, const AuxVars& aux,
                    const Mat& X0, const Mat& Y, std::size_t j) {
    const std::size_t L = net.depth();
    if (j < 1 || j >= L) throw std::invalid_argument("grad_H_x: index out of range");
    check_aux_shapes(net, aux, X0, Y);
    const Mat& prev = (j == 1) ? X0 : aux.x[j - 2];
    const Mat& xnext = (j + 1 < L) ? aux.x[j] : Y;
    Mat Zj = affine_batch(net.layers[j - 1], prev);
    Mat Znext = affine_batch(net.layers[j], aux.x[j - 1]);
    Mat P = prox_batch(net.layers[j].act, Znext) - xnext;
    double lam_next = (j + 1 < L) ? spec.lambda_of(j + 1) : 1.0;
    return lam_next * (net.layers[j].W * P) - spec.lambda_of(j) * Zj;
}

/// prox of tau*(||.||^2/2 + Psi_j + alpha*||.||_1 at the code layer) at v,
/// i.e. prox_{tau/(1+tau)(Psi_j+R)}(v/(1+tau)), columnwise.
inline Mat prox_G_x(const ObjectiveSpec& spec, const Network& net, std::size_t j, const Mat& V,
                    double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("prox_G_x: tau must be > 0");
    const ProxSpec& act = net.layers[j - 1].act;
    double gamma = spec.code_alpha_for(j);
    return prox_scaled_batch(act, V / (1.0 + tau), tau / (1.0 + tau), gamma);
}

}  // namespace lbn
