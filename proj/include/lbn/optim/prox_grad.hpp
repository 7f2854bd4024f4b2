// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include <vector>

#include "lbn/objective.hpp"
#include "lbn/optim/step_sizes.hpp"

namespace lbn {

/// Linearised Bregman iteration state for iterative l1 regularisation of the
/// parameters: keep a subgradient-carrying variable v per parameter block,
/// step v <- v - tau*grad, then Theta = prox_{tau*R}(v). With rho = 0 the
/// update reduces bitwise to the plain gradient step.
struct ParamRegState {
    double rho = 0.0;  // weight of R = rho*||Theta||_1
    std::vector<Mat> vW;
    std::vector<Vec> vb;

    bool active() const { return rho > 0.0; }
    void ensure_init(const Network& net) {
        if (!vW.empty()) return;
        for (const Layer& ly : net.layers) {
            vW.push_back(ly.W);
            vb.push_back(ly.b);
        }
    }
};

/// Resolved per-sweep step sizes.
struct SweepTaus {
    std::vector<double> tau_w;  // per layer
    double tau_b = 1.99;
    std::vector<double> tau_x;  // per hidden layer
};

/// Warm-start caches for the spectral-norm estimates used by the step rules.
struct SweepWork {
    std::vector<PowerIterState> x_warm;  // per layer input matrix
    std::vector<PowerIterState> w_warm;  // per layer weight matrix
};

inline SweepTaus resolve_taus(const Network& net, const AuxVars& aux, const Mat& X0,
                              const StepSizes& steps, SweepWork* work) {
    const std::size_t L = net.depth();
    SweepTaus taus;
    taus.tau_b = steps.tau_b;
    taus.tau_w.resize(L);
    taus.tau_x.resize(L - 1);
    if (steps.rule == StepSizes::Rule::Fixed) {
        for (std::size_t l = 0; l < L; ++l) taus.tau_w[l] = steps.tau_w;
        for (std::size_t j = 0; j + 1 < L; ++j) taus.tau_x[j] = steps.tau_x;
        return taus;
    }
    if (work) {
        work->x_warm.resize(L);
        work->w_warm.resize(L);
    }
    double scale = steps.tau_w_safety * (steps.batch_scaled ? static_cast<double>(X0.cols()) : 1.0);
    for (std::size_t l = 0; l < L; ++l) {
        const Mat& in = (l == 0) ? X0 : aux.x[l - 1];
        taus.tau_w[l] = spectral_stepsize(in, steps.tau_k, scale,
                                          work ? &work->x_warm[l] : nullptr, steps.tau_w_cap);
    }
    for (std::size_t j = 0; j + 1 < L; ++j) {
        double wn = spectral_norm(net.layers[j + 1].W, 1e-6, 100,
                                  work ? &work->w_warm[j + 1] : nullptr);
        taus.tau_x[j] = (wn > 0.0) ? 1.99 / (wn * wn) : steps.tau_w_cap;
    }
    return taus;
}

namespace detail {
inline void soft_threshold_inplace(Mat& M, double t) {
    M = M.unaryExpr([t](double v) { return soft(v, t); });
}
inline void soft_threshold_inplace(Vec& v, double t) {
    v = v.unaryExpr([t](double u) { return soft(u, t); });
}
}  // namespace detail

/// One sweep of the lifted objective over a batch, Gauss-Seidel across the
/// two blocks: explicit gradient steps on all Theta_l (descending l) using
/// the iteration-start activations, then per-sample gradient steps followed
/// by the prox of G on all x_j (descending j) against the updated parameters
/// and iteration-start x-neighbors. The Jacobi variant (x-updates against the
/// pre-update Theta) leaves the printed step-size rules' stable range once
/// activations shrink. The optional anchor adds the batch-normalized
/// proximal-point pull.
inline void lifted_sweep(Network& net, const ObjectiveSpec& spec, const Mat& X0, const Mat& Y,
                         AuxVars& aux, const SweepTaus& taus, double tau_k,
                         const Network* anchor, ParamRegState* reg = nullptr) {
    const std::size_t L = net.depth();
    const double n = static_cast<double>(X0.cols());

    // Iteration-start transformed inputs and residuals: Z_l = f(x_{l-1}, Theta_l),
    // P_l = sigma_l(Z_l) - x_l with x_L the target.
    std::vector<Mat> Z(L), P(L);
    auto refresh = [&]() {
        for (std::size_t l = 0; l < L; ++l) {
            const Mat& prev = (l == 0) ? X0 : aux.x[l - 1];
            const Mat& xl = (l + 1 < L) ? aux.x[l] : Y;
            Z[l] = affine_batch(net.layers[l], prev);
            P[l] = prox_batch(net.layers[l].act, Z[l]) - xl;
        }
    };
    refresh();

    if (reg && reg->active()) reg->ensure_init(net);

    for (std::size_t li = L; li-- > 0;) {
        Layer& ly = net.layers[li];
        const Mat& prev = (li == 0) ? X0 : aux.x[li - 1];
        double lam = (li + 1 < L) ? spec.lambda_of(li + 1) : 1.0;
        Mat gW = (lam / n) * (prev * P[li].transpose());
        Vec gb = (lam / n) * P[li].rowwise().sum();
        double tw = taus.tau_w[li], tb = taus.tau_b;
        if (reg && reg->active()) {
            if (tau_k > 0.0 && anchor) {
                gW.noalias() += (tau_k / n) * (ly.W - anchor->layers[li].W);
                gb.noalias() += (tau_k / n) * (ly.b - anchor->layers[li].b);
            }
            reg->vW[li].noalias() -= tw * gW;
            reg->vb[li].noalias() -= tb * gb;
            ly.W = reg->vW[li];
            detail::soft_threshold_inplace(ly.W, tw * reg->rho);
            ly.b = reg->vb[li];
            detail::soft_threshold_inplace(ly.b, tb * reg->rho);
        } else if (tau_k > 0.0 && anchor) {
            // The proximal-point pull is batch-normalized and, being linear in
            // Theta, stepped implicitly: the printed rule's tau_k/2 denominator
            // under-compensates the anchor curvature once activations shrink,
            // so an explicit pull can leave the stable range.
            double pw = tw * tau_k / n, pb = tb * tau_k / n;
            ly.W = (ly.W - tw * gW + pw * anchor->layers[li].W) / (1.0 + pw);
            ly.b = (ly.b - tb * gb + pb * anchor->layers[li].b) / (1.0 + pb);
        } else {
            ly.W.noalias() -= tw * gW;
            ly.b.noalias() -= tb * gb;
        }
    }

    // x half against the updated parameters; the x-gradients are assembled
    // before any x moves, so neighbors stay at their iteration-start values.
    refresh();
    std::vector<Mat> Gx(L - 1);
    for (std::size_t j = 0; j + 1 < L; ++j) {
        double lam_next = (j + 2 < L) ? spec.lambda_of(j + 2) : 1.0;
        Gx[j] = lam_next * (net.layers[j + 1].W * P[j + 1]) - spec.lambda_of(j + 1) * Z[j];
    }
    for (std::size_t j = L - 1; j-- > 0;) {
        double teff = taus.tau_x[j] / n;
        Mat V = aux.x[j] - teff * Gx[j];
        aux.x[j] = prox_G_x(spec, net, j + 1, V, teff);
    }
}

/// One step of Eqs. 21a/b with fixed step sizes (no proximal-point term).
inline void prox_grad_step(Network& net, const ObjectiveSpec& spec, const Mat& X0, const Mat& Y,
                           AuxVars& aux, double tau_w, double tau_b, double tau_x) {
    if (tau_w == 0.0 && tau_b == 0.0 && tau_x == 0.0) return;
    SweepTaus taus;
    taus.tau_w.assign(net.depth(), tau_w);
    taus.tau_b = tau_b;
    taus.tau_x.assign(net.depth() - 1, tau_x);
    if (tau_x == 0.0) {
        // zero x-step: run the sweep, then restore the untouched aux variables
        AuxVars keep = aux;
        taus.tau_x.assign(net.depth() - 1, 1e-300);
        lifted_sweep(net, spec, X0, Y, aux, taus, 0.0, nullptr);
        aux = std::move(keep);
        return;
    }
    lifted_sweep(net, spec, X0, Y, aux, taus, 0.0, nullptr);
}

/// Runs N inner iterations of the printed Theta/x updates on one batch
/// sub-problem, proximally anchored at `anchor` with weight tau_k. Appends the
/// sub-problem objective (lifted batch objective + proximal term) per
/// iteration to `trace` when given.
inline void solve_batch_subproblem(Network& net, const ObjectiveSpec& spec, const Mat& X0,
                                   const Mat& Y, AuxVars& aux, const StepSizes& steps,
                                   const Network& anchor, ParamRegState* reg = nullptr,
                                   std::vector<double>* trace = nullptr,
                                   SweepWork* work = nullptr) {
    SweepWork local;
    if (!work) work = &local;
    auto prox_term = [&]() {
        if (steps.tau_k <= 0.0) return 0.0;
        double q = 0.0;
        for (std::size_t l = 0; l < net.depth(); ++l) {
            q += (net.layers[l].W - anchor.layers[l].W).squaredNorm();
            q += (net.layers[l].b - anchor.layers[l].b).squaredNorm();
        }
        return 0.5 * (steps.tau_k / static_cast<double>(X0.cols())) * q;
    };
    if (trace) trace->push_back(objective_E(spec, net, aux, X0, Y) + prox_term());
    for (int it = 0; it < steps.inner_iters; ++it) {
        SweepTaus taus = resolve_taus(net, aux, X0, steps, work);
        lifted_sweep(net, spec, X0, Y, aux, taus, steps.tau_k, &anchor, reg);
        if (trace) trace->push_back(objective_E(spec, net, aux, X0, Y) + prox_term());
    }
}

}  // namespace lbn
