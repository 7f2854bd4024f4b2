// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lbn/linalg.hpp"

namespace lbn {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Potentials Psi whose proximal maps are the supported activations.
enum class PotentialKind : std::uint8_t {
    NonNegIndicator,   // indicator of the non-negative orthant  -> ReLU
    ScaledL1,          // alpha*||u||_1                          -> soft-thresholding
    TanhPotential,     // u*artanh(u) + (log(1-u^2) - u^2)/2     -> tanh
    SoftmaxPotential,  // sum u_j log u_j - ||u||^2/2 on simplex -> softmax (joint)
    Zero,              // 0                                      -> identity
};

struct ProxSpec {
    PotentialKind kind = PotentialKind::Zero;
    double alpha = 0.0;  // threshold, ScaledL1 only

    static ProxSpec relu() { return {PotentialKind::NonNegIndicator, 0.0}; }
    static ProxSpec soft_threshold(double alpha) {
        if (!(alpha > 0.0)) throw std::invalid_argument("soft_threshold: alpha must be > 0");
        return {PotentialKind::ScaledL1, alpha};
    }
    static ProxSpec tanh_act() { return {PotentialKind::TanhPotential, 0.0}; }
    static ProxSpec softmax_act() { return {PotentialKind::SoftmaxPotential, 0.0}; }
    static ProxSpec identity() { return {PotentialKind::Zero, 0.0}; }

    bool componentwise() const { return kind != PotentialKind::SoftmaxPotential; }
};

// Simplex membership tolerances (float round-off on normalized vectors).
inline constexpr double kSimplexSumTol = 1e-9;
inline constexpr double kSimplexNegTol = 1e-12;

namespace detail {

inline double soft(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

/// log(1 - tanh(z)^2) = log(sech(z)^2), stable for large |z|.
inline double log_sech2(double z) {
    double a = std::abs(z);
    return 2.0 * (std::log(2.0) - a - std::log1p(std::exp(-2.0 * a)));
}

/// Scalar tanh potential: u*artanh(u) + (log(1-u^2) - u^2)/2 on (-1,1).
inline double tanh_potential(double u) {
    if (std::abs(u) >= 1.0) return kInf;
    if (u == 0.0) return 0.0;
    return u * std::atanh(u) + 0.5 * (std::log1p(-u * u) - u * u);
}

/// Solves u + t*(artanh(u) - u) = z on (-1, 1), the scalar prox of t*tanh potential.
/// The left side is strictly increasing (derivative 1 - t + t/(1-u^2) >= 1), so a
/// safeguarded Newton iteration converges for any z.
inline double tanh_prox_scalar(double z, double t) {
    auto F = [&](double u) { return u + t * (std::atanh(u) - u) - z; };
    double lo = -1.0, hi = 1.0;
    double u = std::tanh(z);  // exact for t = 1, good start otherwise
    for (int it = 0; it < 100; ++it) {
        double f = F(u);
        if (std::abs(f) <= 1e-12) return u;
        if (f > 0) hi = u; else lo = u;
        double fp = 1.0 - t + t / (1.0 - u * u);
        double step = f / fp;
        double un = u - step;
        if (!(un > lo && un < hi)) un = 0.5 * (lo + hi);
        if (un <= -1.0 || un >= 1.0) un = 0.5 * (lo + hi);
        u = un;
        if (hi - lo < 1e-16) break;
    }
    return u;
}

/// Scalar prox of t*(Psi + gamma*|.|) for the componentwise potentials.
inline double prox_scalar(const ProxSpec& s, double z, double t, double gamma) {
    switch (s.kind) {
        case PotentialKind::NonNegIndicator:
            return std::max(0.0, z - t * gamma);
        case PotentialKind::ScaledL1:
            return soft(z, t * (s.alpha + gamma));
        case PotentialKind::Zero:
            return gamma > 0.0 ? soft(z, t * gamma) : z;
        case PotentialKind::TanhPotential: {
            if (gamma > 0.0) {
                if (std::abs(z) <= t * gamma) return 0.0;
                double sign = z > 0 ? 1.0 : -1.0;
                return tanh_prox_scalar(z - sign * t * gamma, t);
            }
            if (t == 1.0) return std::tanh(z);
            return tanh_prox_scalar(z, t);
        }
        default:
            throw std::logic_error("prox_scalar: softmax is not componentwise");
    }
}

inline double psi_scalar(const ProxSpec& s, double u) {
    switch (s.kind) {
        case PotentialKind::NonNegIndicator: return u >= 0.0 ? 0.0 : kInf;
        case PotentialKind::ScaledL1: return s.alpha * std::abs(u);
        case PotentialKind::TanhPotential: return tanh_potential(u);
        case PotentialKind::Zero: return 0.0;
        default:
            throw std::logic_error("psi_scalar: softmax is not componentwise");
    }
}

inline bool on_simplex(const Vec& u) {
    double sum = 0.0;
    for (Index j = 0; j < u.size(); ++j) {
        if (u[j] < -kSimplexNegTol) return false;
        sum += u[j];
    }
    return std::abs(sum - 1.0) <= kSimplexSumTol;
}

inline double psi_softmax(const Vec& u) {
    if (!on_simplex(u)) return kInf;
    double v = 0.0;
    for (Index j = 0; j < u.size(); ++j) {
        double uj = std::max(u[j], 0.0);
        if (uj > 0.0) v += uj * std::log(uj) - 0.5 * uj * uj;
    }
    return v;
}

inline Vec softmax(const Vec& z) {
    double m = z.maxCoeff();
    Vec e = (z.array() - m).exp();
    return e / e.sum();
}

/// log(sum exp(z_j)), shifted for stability.
inline double log_sum_exp(const Vec& z) {
    double m = z.maxCoeff();
    return m + std::log((z.array() - m).exp().sum());
}

/// prox of t * softmax potential for t != 1, solved exactly on the simplex.
///
/// KKT stationarity gives (1-t)*u_j + t*log(u_j) = z_j - t - nu per component
/// with a simplex multiplier nu; the left side is strictly increasing for u in
/// (0, min(1, t/(t-1))], so each component inverts monotonically and nu is
/// found by bisection on sum(u(nu)) = 1 (tolerance 1e-10).
inline Vec softmax_prox_scaled(const Vec& z, double t) {
    const Index n = z.size();
    double u_hi = 2.0;
    if (t > 1.0) u_hi = std::min(2.0, (t / (t - 1.0)) * (1.0 - 1e-9));

    auto g = [&](double u) { return (1.0 - t) * u + t * std::log(u); };
    auto ginv = [&](double w) {
        if (w >= g(u_hi)) return u_hi;
        double lo = 1e-300, hi = u_hi;
        double u = std::min(0.5, 0.5 * u_hi);
        for (int it = 0; it < 200; ++it) {
            double f = g(u) - w;
            if (f > 0) hi = u; else lo = u;
            double fp = (1.0 - t) + t / u;
            double un = (fp > 0) ? u - f / fp : 0.5 * (lo + hi);
            if (!(un > lo && un < hi)) un = 0.5 * (lo + hi);
            if (std::abs(un - u) <= 1e-15 * std::max(1.0, u)) { u = un; break; }
            u = un;
        }
        return u;
    };

    auto sum_for = [&](double nu) {
        double s = 0.0;
        for (Index j = 0; j < n; ++j) s += ginv(z[j] - t - nu);
        return s;
    };

    // Bracket nu: sum is decreasing in nu.
    double nu_lo = z.minCoeff() - t - 10.0, nu_hi = z.maxCoeff() - t + 10.0;
    while (sum_for(nu_lo) < 1.0) nu_lo -= 2.0 * (nu_hi - nu_lo);
    while (sum_for(nu_hi) > 1.0) nu_hi += 2.0 * (nu_hi - nu_lo);
    double nu = 0.5 * (nu_lo + nu_hi);
    for (int it = 0; it < 200; ++it) {
        nu = 0.5 * (nu_lo + nu_hi);
        double s = sum_for(nu);
        if (std::abs(s - 1.0) <= 1e-10) break;
        if (s > 1.0) nu_lo = nu; else nu_hi = nu;
    }
    Vec u(n);
    for (Index j = 0; j < n; ++j) u[j] = ginv(z[j] - t - nu);
    return u;
}

}  // namespace detail

/// Psi(u); +inf exactly when u is outside dom(Psi).
inline double psi_eval(const ProxSpec& s, const Vec& u) {
    if (s.kind == PotentialKind::SoftmaxPotential) return detail::psi_softmax(u);
    double v = 0.0;
    for (Index j = 0; j < u.size(); ++j) {
        double p = detail::psi_scalar(s, u[j]);
        if (p == kInf) return kInf;
        v += p;
    }
    return v;
}

/// prox of t*(Psi + gamma*||.||_1) at z. For the softmax potential the l1 term
/// is constant on the simplex, so gamma has no effect there.
inline Vec prox_scaled(const ProxSpec& s, const Vec& z, double t, double gamma = 0.0) {
    if (!(t > 0.0)) throw std::invalid_argument("prox_scaled: t must be > 0");
    if (s.kind == PotentialKind::SoftmaxPotential) {
        return t == 1.0 ? detail::softmax(z) : detail::softmax_prox_scaled(z, t);
    }
    Vec out(z.size());
    for (Index j = 0; j < z.size(); ++j) out[j] = detail::prox_scalar(s, z[j], t, gamma);
    return out;
}

/// sigma(z) = prox_Psi(z).
inline Vec prox(const ProxSpec& s, const Vec& z) { return prox_scaled(s, z, 1.0); }

/// Columnwise prox of t*(Psi + gamma*||.||_1) on a batch matrix; componentwise
/// potentials skip the per-column round trip.
inline Mat prox_scaled_batch(const ProxSpec& s, const Mat& Z, double t, double gamma = 0.0) {
    if (!(t > 0.0)) throw std::invalid_argument("prox_scaled_batch: t must be > 0");
    if (s.componentwise()) {
        switch (s.kind) {
            case PotentialKind::NonNegIndicator:
                if (gamma == 0.0) return Z.cwiseMax(0.0);
                return (Z.array() - t * gamma).max(0.0);
            case PotentialKind::ScaledL1: {
                double thr = t * (s.alpha + gamma);
                return Z.unaryExpr([thr](double z) { return detail::soft(z, thr); });
            }
            case PotentialKind::Zero:
                if (gamma == 0.0) return Z;
                return Z.unaryExpr([t, gamma](double z) { return detail::soft(z, t * gamma); });
            case PotentialKind::TanhPotential:
                if (t == 1.0 && gamma == 0.0) return Z.array().tanh();
                return Z.unaryExpr([&](double z) { return detail::prox_scalar(s, z, t, gamma); });
            default: break;
        }
    }
    Mat out(Z.rows(), Z.cols());
    for (Index i = 0; i < Z.cols(); ++i) out.col(i) = prox_scaled(s, Z.col(i), t, gamma);
    return out;
}

/// Moreau envelope M(z) = ||sigma(z)-z||^2/2 + Psi(sigma(z)).
inline double moreau_env(const ProxSpec& s, const Vec& z) {
    if (s.kind == PotentialKind::Zero) return 0.0;
    Vec sz = prox(s, z);
    double p = psi_eval(s, sz);
    // The prox output lies in dom(Psi); round-off on the simplex sum is inside
    // the membership tolerance, so p is finite.
    return 0.5 * (sz - z).squaredNorm() + p;
}

/// (||.||^2/2 + Psi)*(z) = ||z||^2/2 - M(z).
inline double star_eval(const ProxSpec& s, const Vec& z) {
    return 0.5 * z.squaredNorm() - moreau_env(s, z);
}

}  // namespace lbn
