// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include <functional>
#include <utility>

#include "lbn/data.hpp"
#include "lbn/metrics.hpp"
#include "lbn/optim/prox_grad.hpp"

namespace lbn {

/// Mutable training record shared by all trainers.
struct TrainState {
    Network net;
    std::vector<Mat> last_aux;  // auxiliary variables of the last solved batch
    int epoch = 0;
    std::uint64_t seed = 0;
    std::vector<MetricsRow> history;  // append-only
};

/// Called once per epoch; fills the metrics row for the harness.
using EpochHook = std::function<void(const Network&, int epoch, TrainState&)>;

inline void default_hook(const Network&, int, TrainState&) {}

struct LbnOptions {
    Index batch_size = 0;  // 0 = full batch
    int epochs = 1;
    int first_epoch = 1;   // epoch numbering base (shuffle nonce + metrics)
    StepSizes steps;
    std::vector<double> tau_k_schedule;  // per-epoch tau_k; empty = constant steps.tau_k
    std::uint64_t seed = 1;
    ObjectiveSpec objective;
    ParamRegState param_reg;  // rho = 0 disables iterative regularisation

    double tau_k_at(int epoch) const {
        if (tau_k_schedule.empty()) return steps.tau_k;
        std::size_t i = std::min(tau_k_schedule.size() - 1,
                                 static_cast<std::size_t>(std::max(0, epoch - 1)));
        return tau_k_schedule[i];
    }
};

/// Implicit stochastic lifted Bregman learning: per epoch, the shuffled
/// batches are visited sequentially; each batch sub-problem re-initializes its
/// auxiliary variables with forward activations, runs N inner iterations of
/// the Theta/x updates proximally anchored at the pre-batch parameters, and
/// commits. tau_k = 0 with a full batch gives the deterministic variant.
inline TrainState train_lbn(Network net, const Mat& X0, const Mat& Y, const LbnOptions& opt,
                            const EpochHook& hook = default_hook) {
    net.check();
    TrainState st;
    st.seed = opt.seed;
    ParamRegState reg = opt.param_reg;
    SweepWork work;
    const Index s = X0.cols();
    const Index bs = opt.batch_size > 0 ? opt.batch_size : s;
    for (int e = 0; e < opt.epochs; ++e) {
        const int epoch = opt.first_epoch + e;
        StepSizes steps = opt.steps;
        steps.tau_k = opt.tau_k_at(epoch);
        for (const auto& idx : batches(s, bs, opt.seed, epoch)) {
            Mat Xb = gather_cols(X0, idx);
            Mat Yb = gather_cols(Y, idx);
            AuxVars aux = init_aux(net, Xb);
            Network anchor = net;
            solve_batch_subproblem(net, opt.objective, Xb, Yb, aux, steps, anchor, &reg,
                                   nullptr, &work);
            st.last_aux = std::move(aux.x);
        }
        st.epoch = epoch;
        hook(net, epoch, st);
    }
    st.net = std::move(net);
    return st;
}

/// Elementwise mean of per-worker parameters.
inline Network model_average(const std::vector<Network>& workers) {
    if (workers.empty()) throw std::invalid_argument("model_average: no workers");
    Network avg = workers.front();
    for (std::size_t w = 1; w < workers.size(); ++w) {
        if (workers[w].depth() != avg.depth())
            throw std::invalid_argument("model_average: depth mismatch");
        for (std::size_t l = 0; l < avg.depth(); ++l) {
            if (workers[w].layers[l].W.rows() != avg.layers[l].W.rows() ||
                workers[w].layers[l].W.cols() != avg.layers[l].W.cols())
                throw std::invalid_argument("model_average: shape mismatch");
            avg.layers[l].W += workers[w].layers[l].W;
            avg.layers[l].b += workers[w].layers[l].b;
        }
    }
    double inv = 1.0 / static_cast<double>(workers.size());
    for (Layer& ly : avg.layers) {
        ly.W *= inv;
        ly.b *= inv;
    }
    return avg;
}

/// Data-parallel model averaging: each epoch splits the data into m parts,
/// every part solves its sub-problem proximally anchored at the previous
/// epoch's average (starting from it), and the results are averaged. Workers
/// run in a fixed order, so the result is reproducible.
inline TrainState train_parallel(Network net, const Mat& X0, const Mat& Y, int m,
                                 const LbnOptions& opt, const EpochHook& hook = default_hook) {
    net.check();
    TrainState st;
    st.seed = opt.seed;
    const Index s = X0.cols();
    std::vector<SweepWork> works(static_cast<std::size_t>(m));
    std::vector<ParamRegState> regs(static_cast<std::size_t>(m), opt.param_reg);
    for (int e = 0; e < opt.epochs; ++e) {
        const int epoch = opt.first_epoch + e;
        StepSizes steps = opt.steps;
        steps.tau_k = opt.tau_k_at(epoch);
        Network anchor = net;
        std::vector<Network> results;
        std::size_t p = 0;
        for (const auto& idx : partition_m(s, m, opt.seed, epoch)) {
            Mat Xb = gather_cols(X0, idx);
            Mat Yb = gather_cols(Y, idx);
            Network worker = anchor;
            AuxVars aux = init_aux(worker, Xb);
            solve_batch_subproblem(worker, opt.objective, Xb, Yb, aux, steps, anchor, &regs[p],
                                   nullptr, &works[p]);
            results.push_back(std::move(worker));
            st.last_aux = std::move(aux.x);
            ++p;
        }
        net = model_average(results);
        st.epoch = epoch;
        hook(net, epoch, st);
    }
    st.net = std::move(net);
    return st;
}

/// Constrained variant: alternates inner minimisation of the lambda-weighted
/// Lagrangian with proximal multiplier ascent
/// lambda_l <- max(0, lambda_l + tau_dual * mean_i B(x_l^i, f(x_{l-1}^i))).
/// Keeps a persistent full-batch set of auxiliary variables.
struct ConstrainedResult {
    TrainState state;
    std::vector<double> lambda;
};

inline ConstrainedResult train_constrained(Network net, const Mat& X0, const Mat& Y,
                                           double tau_dual, const LbnOptions& opt,
                                           const EpochHook& hook = default_hook) {
    if (!(tau_dual > 0.0)) throw std::invalid_argument("train_constrained: tau_dual must be > 0");
    net.check();
    const std::size_t L = net.depth();
    std::vector<double> lambda(L - 1, 1.0);
    AuxVars aux = init_aux(net, X0);
    TrainState st;
    st.seed = opt.seed;
    SweepWork work;
    for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
        ObjectiveSpec spec = opt.objective;
        spec.lambda = lambda;
        Network anchor = net;
        solve_batch_subproblem(net, spec, X0, Y, aux, opt.steps, anchor, nullptr, nullptr, &work);
        // Multiplier ascent on the mean per-layer penalties at the new iterate.
        for (std::size_t l = 0; l + 1 < L; ++l) {
            const Mat& prev = (l == 0) ? X0 : aux.x[l - 1];
            Mat Z = affine_batch(net.layers[l], prev);
            BregmanLoss loss{net.layers[l].act, BregmanEvalMode::Generic};
            double pen = 0.0;
            for (Index i = 0; i < X0.cols(); ++i)
                pen += bregman_eval(loss, aux.x[l].col(i), Z.col(i));
            pen /= static_cast<double>(X0.cols());
            lambda[l] = std::max(0.0, lambda[l] + tau_dual * pen);
        }
        st.epoch = epoch;
        hook(net, epoch, st);
    }
    st.last_aux = std::move(aux.x);
    st.net = std::move(net);
    return {std::move(st), std::move(lambda)};
}

}  // namespace lbn
