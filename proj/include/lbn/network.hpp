// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbn/prox.hpp"
#include "lbn/rng.hpp"

namespace lbn {

/// One affine layer. W has shape (in x out) and is applied as W^T x + b, so
/// the Jacobians of f with respect to W and x stay literal outer/matrix
/// products in the lifted gradients.
struct Layer {
    Mat W;
    Vec b;
    ProxSpec act;

    Index in_dim() const { return W.rows(); }
    Index out_dim() const { return W.cols(); }
};

struct Network {
    std::vector<Layer> layers;

    std::size_t depth() const { return layers.size(); }
    Index in_dim() const { return layers.front().in_dim(); }
    Index out_dim() const { return layers.back().out_dim(); }

    void check() const {
        if (layers.empty()) throw std::invalid_argument("Network: at least one layer required");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const Layer& ly = layers[l];
            if (ly.b.size() != ly.out_dim())
                throw std::invalid_argument("Network: bias width mismatch at layer " + std::to_string(l + 1));
            if (l > 0 && layers[l - 1].out_dim() != ly.in_dim())
                throw std::invalid_argument("Network: dimension chain broken at layer " + std::to_string(l + 1));
            if (!ly.W.allFinite() || !ly.b.allFinite())
                throw std::invalid_argument("Network: non-finite parameters at layer " + std::to_string(l + 1));
        }
    }
};

inline Vec affine(const Layer& layer, const Vec& x) {
    if (x.size() != layer.in_dim())
        throw std::invalid_argument("affine: input dimension mismatch");
    return layer.W.transpose() * x + layer.b;
}

/// Batch version; columns are samples.
inline Mat affine_batch(const Layer& layer, const Mat& X) {
    if (X.rows() != layer.in_dim())
        throw std::invalid_argument("affine_batch: input dimension mismatch");
    Mat Z = layer.W.transpose() * X;
    Z.colwise() += layer.b;
    return Z;
}

/// Applies the layer's activation prox columnwise.
inline Mat prox_batch(const ProxSpec& s, const Mat& Z) { return prox_scaled_batch(s, Z, 1.0); }

/// Activation chain x_1 .. x_L; x_L is the prediction.
inline std::vector<Vec> forward(const Network& net, const Vec& x0) {
    std::vector<Vec> xs;
    xs.reserve(net.depth());
    const Vec* prev = &x0;
    for (const Layer& ly : net.layers) {
        xs.push_back(prox(ly.act, affine(ly, *prev)));
        prev = &xs.back();
    }
    return xs;
}

inline std::vector<Mat> forward_batch(const Network& net, const Mat& X0) {
    std::vector<Mat> xs;
    xs.reserve(net.depth());
    const Mat* prev = &X0;
    for (const Layer& ly : net.layers) {
        xs.push_back(prox_batch(ly.act, affine_batch(ly, *prev)));
        prev = &xs.back();
    }
    return xs;
}

/// Glorot-uniform initialization: W_ij ~ U(+-sqrt(6/(m_in+m_out))), b = 0.
/// Entries are drawn in a fixed row-major order, so a seed pins the network.
inline Network init_glorot(const std::vector<Index>& widths, const std::vector<ProxSpec>& acts,
                           std::uint64_t seed) {
    if (widths.size() < 2) throw std::invalid_argument("init_glorot: need input and output widths");
    if (acts.size() != widths.size() - 1)
        throw std::invalid_argument("init_glorot: one activation per layer required");
    Rng rng(seed);
    Network net;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        Layer ly;
        ly.W.resize(widths[l], widths[l + 1]);
        double limit = std::sqrt(6.0 / static_cast<double>(widths[l] + widths[l + 1]));
        for (Index i = 0; i < ly.W.rows(); ++i)
            for (Index j = 0; j < ly.W.cols(); ++j)
                ly.W(i, j) = rng.uniform(-limit, limit);
        ly.b = Vec::Zero(widths[l + 1]);
        ly.act = acts[l];
        net.layers.push_back(std::move(ly));
    }
    return net;
}

/// Per-sample, per-layer auxiliary activation variables x_l^i (the lifted
/// coordinates), layers 1..L-1. x[j] holds layer j+1, one column per sample.
struct AuxVars {
    std::vector<Mat> x;
};

/// Initializes the auxiliary variables with the forward-pass activations, so
/// every lifted penalty is exactly zero right after initialization.
inline AuxVars init_aux(const Network& net, const Mat& X0) {
    AuxVars aux;
    const Mat* prev = &X0;
    for (std::size_t l = 0; l + 1 < net.depth(); ++l) {
        aux.x.push_back(prox_batch(net.layers[l].act, affine_batch(net.layers[l], *prev)));
        prev = &aux.x.back();
    }
    return aux;
}

/// Fraction of (node, sample) pairs whose pre-activation is >= 0, per hidden
/// layer; defined for ReLU layers, nullopt elsewhere.
inline std::vector<std::optional<double>> linear_activation_rate(const Network& net, const Mat& X0) {
    std::vector<std::optional<double>> rates;
    Mat prev = X0;
    for (std::size_t l = 0; l + 1 < net.depth(); ++l) {
        Mat Z = affine_batch(net.layers[l], prev);
        if (net.layers[l].act.kind == PotentialKind::NonNegIndicator) {
            double hits = (Z.array() >= 0.0).count();
            rates.push_back(hits / static_cast<double>(Z.size()));
        } else {
            rates.push_back(std::nullopt);
        }
        prev = prox_batch(net.layers[l].act, Z);
    }
    return rates;
}

/// Fraction of entries with |value| <= tol. Soft-thresholding produces exact
/// zeros, so the tolerance only guards round-off.
inline double sparsity_rate(const Mat& code, double tol = 1e-12) {
    if (code.size() == 0) return 0.0;
    double zeros = (code.array().abs() <= tol).count();
    return zeros / static_cast<double>(code.size());
}

}  // namespace lbn
