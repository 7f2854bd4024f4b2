// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include <cmath>
#include <stdexcept>

#include "lbn/prox.hpp"

namespace lbn {

/// B_Psi(x, z) = ||x||^2/2 + Psi(x) + (||.||^2/2 + Psi)*(z) - <x, z>.
///
/// Generic mode evaluates that expression through the Moreau envelope (exact up
/// to round-off, never a numeric supremum); ClosedForm uses the per-potential
/// specializations. Both agree to 1e-10 on in-domain inputs. The scalar
/// soft-thresholding loss keeps the z-independent terms (e.g. (alpha+x)^2/2 for
/// z > alpha, x >= 0) so the lower bound B >= ||x - sigma(z)||^2/2 holds.
enum class BregmanEvalMode { Generic, ClosedForm };

struct BregmanLoss {
    ProxSpec spec;
    BregmanEvalMode mode = BregmanEvalMode::Generic;
};

namespace detail {

inline double bregman_closed_relu(const Vec& x, const Vec& z) {
    double v = 0.0;
    for (Index j = 0; j < x.size(); ++j) {
        if (x[j] < 0.0) return kInf;
        double d = x[j] - std::max(z[j], 0.0);
        v += 0.5 * d * d + x[j] * std::max(-z[j], 0.0);
    }
    return v;
}

inline double bregman_closed_soft(double alpha, const Vec& x, const Vec& z) {
    double v = 0.0;
    for (Index j = 0; j < x.size(); ++j) {
        double xj = x[j], zj = z[j];
        if (zj > alpha) {
            double d = zj - alpha - xj;
            v += 0.5 * d * d + alpha * (std::abs(xj) - xj);
        } else if (zj < -alpha) {
            double d = zj + alpha - xj;
            v += 0.5 * d * d + alpha * (std::abs(xj) + xj);
        } else {
            v += 0.5 * xj * xj + alpha * std::abs(xj) - xj * zj;
        }
    }
    return v;
}

inline double bregman_closed_tanh(const Vec& x, const Vec& z) {
    double v = 0.0;
    for (Index j = 0; j < x.size(); ++j) {
        double xj = x[j], zj = z[j];
        if (std::abs(xj) >= 1.0) return kInf;
        v += 0.5 * (std::log1p(-xj * xj) - log_sech2(zj)) + xj * (std::atanh(xj) - zj);
    }
    return v;
}

inline double bregman_closed_softmax(const Vec& x, const Vec& z) {
    if (!on_simplex(x)) return kInf;
    double v = log_sum_exp(z);
    for (Index j = 0; j < x.size(); ++j) {
        double xj = std::max(x[j], 0.0);
        if (xj > 0.0) v += xj * (std::log(xj) - z[j]);
    }
    return v;
}

}  // namespace detail

inline double bregman_eval(const BregmanLoss& loss, const Vec& x, const Vec& z) {
    if (x.size() != z.size()) throw std::invalid_argument("bregman_eval: dimension mismatch");
    if (loss.mode == BregmanEvalMode::ClosedForm) {
        switch (loss.spec.kind) {
            case PotentialKind::NonNegIndicator: return detail::bregman_closed_relu(x, z);
            case PotentialKind::ScaledL1: return detail::bregman_closed_soft(loss.spec.alpha, x, z);
            case PotentialKind::TanhPotential: return detail::bregman_closed_tanh(x, z);
            case PotentialKind::SoftmaxPotential: return detail::bregman_closed_softmax(x, z);
            case PotentialKind::Zero: return 0.5 * (x - z).squaredNorm();
        }
    }
    double px = psi_eval(loss.spec, x);
    if (px == kInf) return kInf;
    return 0.5 * x.squaredNorm() + px + star_eval(loss.spec, z) - x.dot(z);
}

/// grad_z B_Psi(x, z) = sigma(z) - x; requires x in dom(Psi) (else the loss is
/// +inf and the gradient is undefined).
inline Vec bregman_grad_z(const BregmanLoss& loss, const Vec& x, const Vec& z) {
    if (x.size() != z.size()) throw std::invalid_argument("bregman_grad_z: dimension mismatch");
    if (psi_eval(loss.spec, x) == kInf)
        throw std::domain_error("bregman_grad_z: x outside dom(Psi)");
    return prox(loss.spec, z) - x;
}

}  // namespace lbn
