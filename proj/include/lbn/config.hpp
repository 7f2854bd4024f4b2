// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbn/objective.hpp"

namespace lbn {

enum class Optimizer { LBN_S, LBN_D, GD_BP, SGD_BP, ISGD_BP, CD, ADMM, PARALLEL };

inline const char* to_string(Optimizer o) {
    switch (o) {
        case Optimizer::LBN_S: return "lbn-s";
        case Optimizer::LBN_D: return "lbn-d";
        case Optimizer::GD_BP: return "gd-bp";
        case Optimizer::SGD_BP: return "sgd-bp";
        case Optimizer::ISGD_BP: return "isgd-bp";
        case Optimizer::CD: return "cd";
        case Optimizer::ADMM: return "admm";
        case Optimizer::PARALLEL: return "parallel";
    }
    return "?";
}

inline const char* to_string(Task t) {
    switch (t) {
        case Task::Classification: return "classification";
        case Task::Autoencoder: return "autoencoder";
        case Task::DenoisingAutoencoder: return "denoising-autoencoder";
    }
    return "?";
}

struct RunConfig {
    std::string preset;
    Task task = Task::Classification;
    Optimizer optimizer = Optimizer::LBN_S;
    std::string dataset = "mnist";   // mnist | fashion-mnist
    Index subsample_n = 0;           // 0 = full training set
    int epochs = 100;
    Index batch_size = 100;
    int inner_iters = 15;            // N
    double tau_k = 0.0;
    double tau_b = 1.99;
    double tau_w_safety = 1.0;       // multiplier on the spectral tau_W rule
    bool batch_scaled = false;       // s factor in the spectral tau_W rule
    double lr = 1e-3;
    double alpha = 0.0;              // l1 weight on the code
    double code_act_alpha = 0.0;     // threshold of the code activation (0 = use alpha)
    int code_layer = 0;              // 0 = floor(L/2) when alpha > 0
    double lambda = 1.0;
    double param_reg_l1 = 0.0;       // iterative (linearised Bregman) l1 on Theta
    double kink_value = 0.0;         // sigma' at kinks for the BP baselines
    double noise_std = 1e-3;
    bool renoise_per_epoch = false;  // re-sample the corruption each epoch
    int workers = 1;                 // PARALLEL
    int val_every = 1;               // 0 = never
    std::uint64_t seed = 1;
    std::vector<Index> widths;       // input width first
    std::string data_dir;
    std::string out_dir = "run";

    std::size_t depth() const { return widths.size() - 1; }
    int resolved_code_layer() const {
        if (code_layer > 0) return code_layer;
        return static_cast<int>(depth() / 2);
    }
};

namespace detail {

inline std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

inline std::vector<Index> parse_widths(const std::string& s) {
    std::vector<Index> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, 'x')) out.push_back(std::stoll(tok));
    return out;
}

}  // namespace detail

inline Optimizer optimizer_from(const std::string& s) {
    if (s == "lbn-s") return Optimizer::LBN_S;
    if (s == "lbn-d") return Optimizer::LBN_D;
    if (s == "gd-bp") return Optimizer::GD_BP;
    if (s == "sgd-bp") return Optimizer::SGD_BP;
    if (s == "isgd-bp") return Optimizer::ISGD_BP;
    if (s == "cd") return Optimizer::CD;
    if (s == "admm") return Optimizer::ADMM;
    if (s == "parallel") return Optimizer::PARALLEL;
    throw std::invalid_argument("unknown optimizer: " + s);
}

inline Task task_from(const std::string& s) {
    if (s == "classification") return Task::Classification;
    if (s == "autoencoder") return Task::Autoencoder;
    if (s == "denoising-autoencoder") return Task::DenoisingAutoencoder;
    throw std::invalid_argument("unknown task: " + s);
}

/// Applies one key=value override.
inline void config_set(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "task") c.task = task_from(value);
    else if (key == "optimizer") c.optimizer = optimizer_from(value);
    else if (key == "dataset") c.dataset = value;
    else if (key == "subsample") c.subsample_n = std::stoll(value);
    else if (key == "epochs") c.epochs = std::stoi(value);
    else if (key == "batch") c.batch_size = std::stoll(value);
    else if (key == "inner_iters") c.inner_iters = std::stoi(value);
    else if (key == "tau_k") c.tau_k = std::stod(value);
    else if (key == "tau_b") c.tau_b = std::stod(value);
    else if (key == "batch_scaled") c.batch_scaled = (value == "1" || value == "true");
    else if (key == "tau_w_safety") c.tau_w_safety = std::stod(value);
    else if (key == "lr") c.lr = std::stod(value);
    else if (key == "alpha") c.alpha = std::stod(value);
    else if (key == "code_act_alpha") c.code_act_alpha = std::stod(value);
    else if (key == "code_layer") c.code_layer = std::stoi(value);
    else if (key == "lambda") c.lambda = std::stod(value);
    else if (key == "param_reg_l1") c.param_reg_l1 = std::stod(value);
    else if (key == "kink_value") c.kink_value = std::stod(value);
    else if (key == "noise_std") c.noise_std = std::stod(value);
    else if (key == "renoise_per_epoch") c.renoise_per_epoch = (value == "1" || value == "true");
    else if (key == "workers") c.workers = std::stoi(value);
    else if (key == "val_every") c.val_every = std::stoi(value);
    else if (key == "seed") c.seed = std::stoull(value);
    else if (key == "widths") c.widths = detail::parse_widths(value);
    else if (key == "data_dir") c.data_dir = value;
    else if (key == "out_dir") c.out_dir = value;
    else throw std::invalid_argument("unknown config key: " + key);
}

/// Flat key=value config file; '#' starts a comment.
inline void config_load_file(RunConfig& c, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("config: cannot open " + path);
    std::string line;
    while (std::getline(f, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            auto e = s.find_last_not_of(" \t\r");
            s.erase(e == std::string::npos ? 0 : e + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (!key.empty()) config_set(c, key, value);
    }
}

/// Named built-ins mirroring the experimental configurations.
inline RunConfig preset_config(const std::string& name) {
    RunConfig c;
    c.preset = name;
    auto classification = [&](const std::string& ds) {
        c.task = Task::Classification;
        c.dataset = ds;
        c.widths = {784, 64, 64, 10};
        c.epochs = 100;
        c.batch_size = 100;
        c.inner_iters = 15;
        c.tau_k = 100.0;
        c.tau_b = 1.99 / (1.0 + c.tau_k / 2.0);
        c.batch_scaled = false;
        c.optimizer = Optimizer::LBN_S;
    };
    auto sparse_ae = [&](const std::string& ds) {
        c.task = Task::Autoencoder;
        c.dataset = ds;
        c.widths = {784, 784, 784, 784, 784};
        c.subsample_n = 1000;
        c.epochs = 100;
        c.batch_size = 20;
        c.inner_iters = 15;
        c.tau_k = 1.0;
        // the printed edge constants diverge here; run at tau = 1/L instead
        c.tau_b = 1.0;
        c.tau_w_safety = 0.5;
        c.batch_scaled = true;
        c.alpha = 0.09;
        c.optimizer = Optimizer::LBN_S;
    };
    auto denoise_1k = [&](const std::string& ds) {
        c.task = Task::DenoisingAutoencoder;
        c.dataset = ds;
        c.widths = {784, 784, 784, 784, 784};
        c.subsample_n = 1000;
        c.epochs = 50;
        c.batch_size = 20;
        c.inner_iters = 15;
        c.tau_k = 0.5;
        c.tau_b = 1.0;
        c.tau_w_safety = 0.5;
        c.batch_scaled = true;
        c.alpha = 0.09;
        c.optimizer = Optimizer::LBN_S;
    };
    auto denoise_10k = [&](const std::string& ds) {
        denoise_1k(ds);
        c.subsample_n = 10000;
        c.batch_size = 200;
        c.inner_iters = 30;
        c.tau_k = 1.0;
        c.alpha = 0.055;
    };

    if (name == "classification-mnist-lbn") classification("mnist");
    else if (name == "classification-fmnist-lbn") classification("fashion-mnist");
    else if (name == "classification-mnist-sgd") { classification("mnist"); c.optimizer = Optimizer::SGD_BP; c.lr = 1e-3; }
    else if (name == "classification-fmnist-sgd") { classification("fashion-mnist"); c.optimizer = Optimizer::SGD_BP; c.lr = 1e-3; }
    else if (name == "classification-mnist1k-lbn") { classification("mnist"); c.subsample_n = 1000; c.batch_size = 100; c.epochs = 50; }
    else if (name == "sparse-ae-mnist1k-lbn-s") sparse_ae("mnist");
    else if (name == "sparse-ae-mnist1k-lbn-d") { sparse_ae("mnist"); c.optimizer = Optimizer::LBN_D; c.tau_k = 0.0; c.batch_size = 0; }
    else if (name == "sparse-ae-mnist1k-gd") { sparse_ae("mnist"); c.optimizer = Optimizer::GD_BP; c.lr = 4e-2; }
    else if (name == "sparse-ae-mnist1k-sgd") { sparse_ae("mnist"); c.optimizer = Optimizer::SGD_BP; c.lr = 3e-2; }
    else if (name == "denoise-fmnist1k-lbn") denoise_1k("fashion-mnist");
    else if (name == "denoise-fmnist1k-sgd") { denoise_1k("fashion-mnist"); c.optimizer = Optimizer::SGD_BP; c.lr = 1e-3; }
    else if (name == "denoise-fmnist1k-isgd") { denoise_1k("fashion-mnist"); c.optimizer = Optimizer::ISGD_BP; c.lr = 1e-3; }
    else if (name == "denoise-fmnist10k-lbn") denoise_10k("fashion-mnist");
    else if (name == "denoise-fmnist10k-sgd") { denoise_10k("fashion-mnist"); c.optimizer = Optimizer::SGD_BP; c.lr = 4e-4; }
    else if (name == "denoise-fmnist10k-isgd") { denoise_10k("fashion-mnist"); c.optimizer = Optimizer::ISGD_BP; c.lr = 4e-4; }
    else throw std::invalid_argument("unknown preset: " + name);
    return c;
}

inline std::vector<std::string> preset_names() {
    return {"classification-mnist-lbn",  "classification-fmnist-lbn", "classification-mnist-sgd",
            "classification-fmnist-sgd", "classification-mnist1k-lbn", "sparse-ae-mnist1k-lbn-s",
            "sparse-ae-mnist1k-lbn-d",   "sparse-ae-mnist1k-gd",      "sparse-ae-mnist1k-sgd",
            "denoise-fmnist1k-lbn",      "denoise-fmnist1k-sgd",      "denoise-fmnist1k-isgd",
            "denoise-fmnist10k-lbn",     "denoise-fmnist10k-sgd",     "denoise-fmnist10k-isgd"};
}

/// Task/optimizer compatibility and shape checks; throws on invalid configs.
inline void validate(const RunConfig& c) {
    if (c.widths.size() < 2) throw std::invalid_argument("config: widths must list input and layers");
    if (c.epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
    if (c.inner_iters < 1) throw std::invalid_argument("config: inner_iters must be >= 1");
    if (c.batch_size < 0) throw std::invalid_argument("config: batch must be >= 0");
    if (c.alpha < 0) throw std::invalid_argument("config: alpha must be >= 0");
    if (c.task == Task::Classification && c.widths.back() != 10)
        throw std::invalid_argument("config: classification needs 10 output units");
    if (c.task != Task::Classification && c.widths.back() != c.widths.front())
        throw std::invalid_argument("config: autoencoder output width must match input");
    if (c.alpha > 0 && c.task == Task::Classification)
        throw std::invalid_argument("config: code l1 regularisation applies to autoencoders");
    if (c.optimizer == Optimizer::PARALLEL && c.workers < 1)
        throw std::invalid_argument("config: parallel optimizer needs workers >= 1");
    if (c.dataset != "mnist" && c.dataset != "fashion-mnist")
        throw std::invalid_argument("config: dataset must be mnist or fashion-mnist");
    if (c.renoise_per_epoch && c.task != Task::DenoisingAutoencoder)
        throw std::invalid_argument("config: renoise_per_epoch needs the denoising task");
    if (c.renoise_per_epoch && (c.optimizer == Optimizer::CD || c.optimizer == Optimizer::ADMM))
        throw std::invalid_argument("config: renoise_per_epoch is not supported for cd/admm");
    if (c.alpha > 0) {
        int cl = c.resolved_code_layer();
        if (cl < 1 || cl >= static_cast<int>(c.depth()))
            throw std::invalid_argument("config: code layer out of range");
    }
}

/// Resolves the data directory: flag, then LBN_DATA_DIR, DATA_DIR, ./data.
inline std::string resolve_data_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    std::string v = detail::env_or("LBN_DATA_DIR", "");
    if (!v.empty()) return v;
    return detail::env_or("DATA_DIR", "data");
}

/// Per-layer activation specs for a config: ReLU hidden layers, an identity
/// output (squared-Euclidean data loss), and a soft-thresholding code layer
/// for the sparse autoencoders.
inline std::vector<ProxSpec> activations_for(const RunConfig& c) {
    std::vector<ProxSpec> acts(c.depth(), ProxSpec::relu());
    acts.back() = ProxSpec::identity();
    if (c.task != Task::Classification && c.alpha > 0.0) {
        double a0 = c.code_act_alpha > 0.0 ? c.code_act_alpha : c.alpha;
        acts[static_cast<std::size_t>(c.resolved_code_layer()) - 1] = ProxSpec::soft_threshold(a0);
    }
    return acts;
}

inline std::string config_to_string(const RunConfig& c) {
    std::ostringstream os;
    os << "preset=" << c.preset << '\n'
       << "task=" << to_string(c.task) << '\n'
       << "optimizer=" << to_string(c.optimizer) << '\n'
       << "dataset=" << c.dataset << '\n'
       << "subsample=" << c.subsample_n << '\n'
       << "epochs=" << c.epochs << '\n'
       << "batch=" << c.batch_size << '\n'
       << "inner_iters=" << c.inner_iters << '\n'
       << "tau_k=" << c.tau_k << '\n'
       << "tau_b=" << c.tau_b << '\n'
       << "batch_scaled=" << (c.batch_scaled ? 1 : 0) << '\n'
       << "tau_w_safety=" << c.tau_w_safety << '\n'
       << "lr=" << c.lr << '\n'
       << "alpha=" << c.alpha << '\n'
       << "code_act_alpha=" << c.code_act_alpha << '\n'
       << "code_layer=" << c.resolved_code_layer() << '\n'
       << "lambda=" << c.lambda << '\n'
       << "param_reg_l1=" << c.param_reg_l1 << '\n'
       << "kink_value=" << c.kink_value << '\n'
       << "noise_std=" << c.noise_std << '\n'
       << "renoise_per_epoch=" << (c.renoise_per_epoch ? 1 : 0) << '\n'
       << "workers=" << c.workers << '\n'
       << "val_every=" << c.val_every << '\n'
       << "seed=" << c.seed << '\n';
    os << "widths=";
    for (std::size_t i = 0; i < c.widths.size(); ++i) os << (i ? "x" : "") << c.widths[i];
    os << '\n';
    return os.str();
}

}  // namespace lbn
