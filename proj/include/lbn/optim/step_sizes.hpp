// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include "lbn/linalg.hpp"

namespace lbn {

/// Step-size configuration for the lifted solvers.
///
/// With rule == SpectralNorm, tau_W follows 1.99*scale/(||X_l^p||_2^2 + tau_k/2)
/// where X_l^p is the batch activation matrix feeding layer l, scale is 1 or
/// the sub-problem sample count (batch_scaled), and tau_x = 1.99/||W_{l+1}||_2^2.
struct StepSizes {
    enum class Rule { Fixed, SpectralNorm };
    Rule rule = Rule::SpectralNorm;
    double tau_w = 0.0;          // Fixed rule only
    double tau_b = 1.99;
    double tau_x = 0.0;          // Fixed rule only
    double tau_k = 0.0;          // proximal-point weight
    int inner_iters = 15;        // N
    bool batch_scaled = false;   // include the sample-count factor in tau_W
    double tau_w_safety = 1.0;   // multiplier on the spectral tau_W (1 = the printed edge)
    double tau_w_cap = 1e3;      // fallback for an all-zero activation matrix at tau_k = 0
};

inline double spectral_stepsize(const Mat& X, double tau_k, double scale = 1.0,
                                PowerIterState* warm = nullptr, double cap = 1e3) {
    double s = spectral_norm(X, 1e-6, 100, warm);
    double n2 = s * s;
    if (n2 == 0.0) {
        if (tau_k > 0.0) return scale * 1.99 / (tau_k / 2.0);
        return cap;
    }
    return scale * 1.99 / (n2 + tau_k / 2.0);
}

}  // namespace lbn
