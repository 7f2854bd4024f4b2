// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include "lbn/data.hpp"
#include "lbn/metrics.hpp"
#include "lbn/network.hpp"
#include "lbn/optim/train_lbn.hpp"

namespace lbn {

/// Value of sigma' at the kinks (ReLU at 0, soft-thresholding at +-alpha);
/// fixed per run.
struct SubgradientPolicy {
    double at_kink = 0.0;
};

namespace detail {

/// delta = dsigma(z)^T v for one layer, columnwise. Componentwise activations
/// multiply elementwise; softmax applies its full Jacobian-vector product.
inline Mat activation_jvp(const ProxSpec& s, const Mat& Z, const Mat& V,
                          const SubgradientPolicy& pol) {
    Mat out(Z.rows(), Z.cols());
    switch (s.kind) {
        case PotentialKind::Zero:
            return V;
        case PotentialKind::NonNegIndicator:
            for (Index i = 0; i < Z.size(); ++i) {
                double z = Z(i);
                out(i) = (z > 0 ? 1.0 : (z < 0 ? 0.0 : pol.at_kink)) * V(i);
            }
            return out;
        case PotentialKind::ScaledL1: {
            double a = s.alpha;
            for (Index i = 0; i < Z.size(); ++i) {
                double az = std::abs(Z(i));
                out(i) = (az > a ? 1.0 : (az < a ? 0.0 : pol.at_kink)) * V(i);
            }
            return out;
        }
        case PotentialKind::TanhPotential:
            for (Index i = 0; i < Z.size(); ++i) {
                double t = std::tanh(Z(i));
                out(i) = (1.0 - t * t) * V(i);
            }
            return out;
        case PotentialKind::SoftmaxPotential:
            for (Index c = 0; c < Z.cols(); ++c) {
                Vec sm = softmax(Z.col(c));
                double dot = sm.dot(V.col(c));
                out.col(c) = sm.cwiseProduct(V.col(c)) - dot * sm;
            }
            return out;
    }
    return out;
}

}  // namespace detail

struct Grads {
    std::vector<Mat> dW;
    std::vector<Vec> db;
};

/// Back-propagation for the MSE loss (1/n) sum_i ||x_L^i - y^i||^2 / 2, with
/// an optional l1 term alpha*||x_code||_1 on the code activation handled by
/// the sign subgradient. Forward pass stores z_l and x_l, backward pass runs
/// the delta recursion; parameter gradients are batch averages.
inline Grads backprop(const Network& net, const Mat& X0, const Mat& Y,
                      const SubgradientPolicy& pol = {}, double code_l1 = 0.0,
                      int code_layer = 0, double* loss_out = nullptr) {
    const std::size_t L = net.depth();
    const double n = static_cast<double>(X0.cols());
    if (Y.rows() != net.out_dim() || Y.cols() != X0.cols())
        throw std::invalid_argument("backprop: target shape mismatch");

    std::vector<Mat> Z(L), X(L);
    const Mat* prev = &X0;
    for (std::size_t l = 0; l < L; ++l) {
        Z[l] = affine_batch(net.layers[l], *prev);
        X[l] = prox_batch(net.layers[l].act, Z[l]);
        prev = &X[l];
    }
    if (loss_out) {
        double loss = 0.5 * (X[L - 1] - Y).squaredNorm() / n;
        if (code_l1 > 0.0 && code_layer >= 1)
            loss += code_l1 * X[static_cast<std::size_t>(code_layer) - 1].array().abs().sum() / n;
        *loss_out = loss;
    }

    Grads g;
    g.dW.resize(L);
    g.db.resize(L);
    Mat delta = detail::activation_jvp(net.layers[L - 1].act, Z[L - 1], X[L - 1] - Y, pol);
    for (std::size_t l = L; l-- > 0;) {
        const Mat& in = (l == 0) ? X0 : X[l - 1];
        g.dW[l] = (in * delta.transpose()) / n;
        g.db[l] = delta.rowwise().sum() / n;
        if (l == 0) break;
        Mat up = net.layers[l].W * delta;
        if (code_l1 > 0.0 && static_cast<int>(l) == code_layer)
            up.noalias() += code_l1 * X[l - 1].array().sign().matrix();
        delta = detail::activation_jvp(net.layers[l - 1].act, Z[l - 1], up, pol);
    }
    return g;
}

struct SgdOptions {
    double lr = 1e-3;
    int epochs = 1;
    int first_epoch = 1;   // epoch numbering base (shuffle nonce + metrics)
    Index batch_size = 0;  // 0 = full batch
    std::uint64_t seed = 1;
    double code_l1 = 0.0;
    int code_layer = 0;
    SubgradientPolicy policy;
    // implicit variant
    double tau_k = 0.0;
    int inner_iters = 1;
};

/// Full-batch (sub-)gradient descent; no batch shuffling, so the RNG stream
/// is untouched.
inline TrainState train_gd(Network net, const Mat& X0, const Mat& Y, const SgdOptions& opt,
                           const EpochHook& hook = default_hook) {
    net.check();
    TrainState st;
    st.seed = opt.seed;
    for (int e = 0; e < opt.epochs; ++e) {
        const int epoch = opt.first_epoch + e;
        Grads g = backprop(net, X0, Y, opt.policy, opt.code_l1, opt.code_layer);
        for (std::size_t l = 0; l < net.depth(); ++l) {
            net.layers[l].W.noalias() -= opt.lr * g.dW[l];
            net.layers[l].b.noalias() -= opt.lr * g.db[l];
        }
        st.epoch = epoch;
        hook(net, epoch, st);
    }
    st.net = std::move(net);
    return st;
}

/// Mini-batch (sub-)gradient descent with per-epoch reshuffled batches.
inline TrainState train_sgd(Network net, const Mat& X0, const Mat& Y, const SgdOptions& opt,
                            const EpochHook& hook = default_hook) {
    net.check();
    TrainState st;
    st.seed = opt.seed;
    const Index s = X0.cols();
    const Index bs = opt.batch_size > 0 ? opt.batch_size : s;
    for (int e = 0; e < opt.epochs; ++e) {
        const int epoch = opt.first_epoch + e;
        for (const auto& idx : batches(s, bs, opt.seed, epoch)) {
            Mat Xb = gather_cols(X0, idx);
            Mat Yb = gather_cols(Y, idx);
            Grads g = backprop(net, Xb, Yb, opt.policy, opt.code_l1, opt.code_layer);
            for (std::size_t l = 0; l < net.depth(); ++l) {
                net.layers[l].W.noalias() -= opt.lr * g.dW[l];
                net.layers[l].b.noalias() -= opt.lr * g.db[l];
            }
        }
        st.epoch = epoch;
        hook(net, epoch, st);
    }
    st.net = std::move(net);
    return st;
}

/// Implicit SGD: each batch sub-problem minimizes the batch loss plus the
/// proximal-point term (tau_k/2)||Theta - Theta^k||^2 by N inner GD-BP steps.
inline TrainState train_isgd(Network net, const Mat& X0, const Mat& Y, const SgdOptions& opt,
                             const EpochHook& hook = default_hook) {
    net.check();
    TrainState st;
    st.seed = opt.seed;
    const Index s = X0.cols();
    const Index bs = opt.batch_size > 0 ? opt.batch_size : s;
    for (int e = 0; e < opt.epochs; ++e) {
        const int epoch = opt.first_epoch + e;
        for (const auto& idx : batches(s, bs, opt.seed, epoch)) {
            Mat Xb = gather_cols(X0, idx);
            Mat Yb = gather_cols(Y, idx);
            Network anchor = net;
            const double nb = static_cast<double>(Xb.cols());
            // The quadratic anchor term is linear in Theta, so it is stepped
            // implicitly (the loss gradient stays explicit). This keeps the
            // inner loop stable for any tau_k and pins Theta to the anchor in
            // the tau_k -> inf limit.
            const double pull = opt.lr * opt.tau_k / nb;
            for (int it = 0; it < opt.inner_iters; ++it) {
                Grads g = backprop(net, Xb, Yb, opt.policy, opt.code_l1, opt.code_layer);
                for (std::size_t l = 0; l < net.depth(); ++l) {
                    Layer& ly = net.layers[l];
                    ly.W = (ly.W - opt.lr * g.dW[l] + pull * anchor.layers[l].W) / (1.0 + pull);
                    ly.b = (ly.b - opt.lr * g.db[l] + pull * anchor.layers[l].b) / (1.0 + pull);
                }
            }
        }
        st.epoch = epoch;
        hook(net, epoch, st);
    }
    st.net = std::move(net);
    return st;
}

}  // namespace lbn
