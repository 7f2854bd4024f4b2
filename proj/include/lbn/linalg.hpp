// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

namespace lbn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Warm-start storage for repeated spectral-norm estimates of a slowly
/// changing matrix (keeps the last right singular vector).
struct PowerIterState {
    Vec v;
};

namespace detail {

// Fixed pseudo-random stream for power-iteration starting vectors; a constant
// seed keeps the estimate deterministic and independent of any caller RNG.
inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline Vec power_iteration_start(Index n) {
    std::uint64_t s = 0x5bd1e995u;
    Vec v(n);
    for (Index i = 0; i < n; ++i) {
        v[i] = static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53 - 0.5;
    }
    double norm = v.norm();
    if (norm == 0.0) v.setConstant(1.0 / std::sqrt(static_cast<double>(n)));
    else v /= norm;
    return v;
}

}  // namespace detail

/// Largest singular value of A by power iteration on A^T A.
inline double spectral_norm(const Mat& A, double tol = 1e-6, int max_iters = 100,
                            PowerIterState* state = nullptr) {
    if (A.size() == 0) return 0.0;
    Vec v;
    if (state && state->v.size() == A.cols()) {
        v = state->v;
        double n = v.norm();
        if (n > 0) v /= n; else v = detail::power_iteration_start(A.cols());
    } else {
        v = detail::power_iteration_start(A.cols());
    }
    double sigma = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Vec w = A * v;
        double s = w.norm();
        if (s == 0.0) { sigma = 0.0; break; }
        Vec u = A.transpose() * w;
        double un = u.norm();
        if (un == 0.0) { sigma = s; break; }
        v = u / un;
        if (std::abs(s - sigma) <= tol * std::max(1.0, s)) { sigma = s; break; }
        sigma = s;
    }
    if (state) state->v = v;
    return sigma;
}

}  // namespace lbn
