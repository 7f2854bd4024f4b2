// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>

#include "lbn/baselines.hpp"
#include "lbn/config.hpp"
#include "lbn/model_io.hpp"
#include "lbn/optim/admm.hpp"
#include "lbn/optim/coordinate_descent.hpp"
#include "lbn/optim/train_lbn.hpp"

namespace lbn {

struct DataSplits {
    Dataset train, val;
};

namespace detail {

inline std::string find_idx_file(const std::string& dir, const std::string& dataset,
                                 const std::string& file) {
    namespace fs = std::filesystem;
    for (const auto& cand : {dir + "/" + dataset + "/" + file, dir + "/" + file}) {
        if (fs::exists(cand)) return cand;
    }
    throw std::runtime_error("dataset file not found: " + file + " under " + dir +
                             " (set DATA_DIR or --data; see tools/fetch_mnist.sh)");
}

}  // namespace detail

/// Loads and preprocesses the config's dataset: centering with the training
/// mean, one-hot labels or clean-image targets, optional fixed noise, and the
/// training-set subsample. The validation split stays untouched.
inline DataSplits load_splits(const RunConfig& c) {
    const std::string dir = resolve_data_dir(c.data_dir);
    RawIdx train_raw = load_idx(detail::find_idx_file(dir, c.dataset, "train-images-idx3-ubyte"),
                                detail::find_idx_file(dir, c.dataset, "train-labels-idx1-ubyte"));
    RawIdx val_raw = load_idx(detail::find_idx_file(dir, c.dataset, "t10k-images-idx3-ubyte"),
                              detail::find_idx_file(dir, c.dataset, "t10k-labels-idx1-ubyte"));
    PreprocessOptions opt;
    opt.target = (c.task == Task::Classification) ? TargetKind::OneHot : TargetKind::CleanImage;
    opt.add_noise = (c.task == Task::DenoisingAutoencoder);
    opt.noise_std = c.noise_std;
    Vec mean = mean_image_of(train_raw);
    DataSplits ds;
    ds.train = preprocess(train_raw, mean, opt, mix_seed(c.seed, 0x4015e), c.dataset + "-train");
    ds.val = preprocess(val_raw, mean, opt, mix_seed(c.seed, 0x401f), c.dataset + "-val");
    if (c.subsample_n > 0) ds.train = subsample(ds.train, c.subsample_n, c.seed);
    return ds;
}

struct EvalReport {
    double objective = 0.0;  // data loss (+ code l1 where configured)
    double mse = 0.0;        // squared-Euclidean data loss, (1/n) sum ||.||^2/2
    std::optional<double> accuracy;
    std::optional<double> sparsity;
    std::vector<std::optional<double>> linear_rates;
};

/// Forward-pass metrics of a network on a dataset.
inline EvalReport evaluate_net(const Network& net, const Dataset& ds, Task task,
                               double code_l1 = 0.0, int code_layer = 0) {
    EvalReport rep;
    const Mat& X0 = ds.chain_inputs();
    std::vector<Mat> chain = forward_batch(net, X0);
    const Mat& out = chain.back();
    const double n = static_cast<double>(X0.cols());
    rep.mse = 0.5 * (out - ds.targets).squaredNorm() / n;
    rep.objective = rep.mse;
    if (task == Task::Classification) {
        Index hits = 0;
        for (Index i = 0; i < out.cols(); ++i) {
            Index pred;
            out.col(i).maxCoeff(&pred);
            if (static_cast<int>(pred) == ds.labels[static_cast<std::size_t>(i)]) ++hits;
        }
        rep.accuracy = hits / n;
    } else if (code_layer >= 1) {
        const Mat& code = chain[static_cast<std::size_t>(code_layer) - 1];
        rep.sparsity = sparsity_rate(code);
        if (code_l1 > 0.0) rep.objective += code_l1 * code.array().abs().sum() / n;
    }
    rep.linear_rates = linear_activation_rate(net, X0);
    return rep;
}

namespace detail {

/// Un-centers, clamps to [0,1] and tiles images column-wise into a grid.
inline Mat image_grid(const Mat& images, const Vec& mean_image, Index rows, Index cols,
                      Index max_count) {
    Index count = std::min(images.cols(), max_count);
    Mat grid(rows, cols * count);
    for (Index i = 0; i < count; ++i) {
        Vec img = images.col(i) + mean_image;
        for (Index r = 0; r < rows; ++r)
            for (Index ccol = 0; ccol < cols; ++ccol)
                grid(r, i * cols + ccol) = img[r * cols + ccol];
    }
    return grid;
}

inline void write_reconstructions(const Network& net, const Dataset& ds, const std::string& path) {
    Index count = std::min<Index>(8, ds.size());
    Mat inputs = ds.chain_inputs().leftCols(count);
    std::vector<Mat> chain = forward_batch(net, inputs);
    Mat stacked(ds.img_rows * 2, ds.img_cols * count);
    Mat top = image_grid(ds.targets.leftCols(count), ds.mean_image, ds.img_rows, ds.img_cols, count);
    Mat bottom = image_grid(chain.back(), ds.mean_image, ds.img_rows, ds.img_cols, count);
    stacked.topRows(ds.img_rows) = top;
    stacked.bottomRows(ds.img_rows) = bottom;
    write_pgm(path, stacked);
}

}  // namespace detail

/// Builds the metrics recorder shared by every optimizer.
inline EpochHook metrics_hook(const RunConfig& c, const DataSplits& ds,
                              std::chrono::steady_clock::time_point t0) {
    int code_layer = (c.task != Task::Classification && c.alpha > 0.0) ? c.resolved_code_layer() : 0;
    return [&c, &ds, t0, code_layer](const Network& net, int epoch, TrainState& st) {
        MetricsRow row;
        row.epoch = epoch;
        EvalReport train = evaluate_net(net, ds.train, c.task, c.alpha, code_layer);
        row.train_objective = train.objective;
        row.train_acc = train.accuracy;
        row.sparsity = train.sparsity;
        for (std::size_t l = 0; l < train.linear_rates.size() && l < 3; ++l)
            row.linear_rate[l] = train.linear_rates[l];
        bool do_val = c.val_every > 0 && (epoch % c.val_every == 0 || epoch == c.epochs);
        if (do_val) {
            EvalReport val = evaluate_net(net, ds.val, c.task, 0.0, code_layer);
            row.val_objective = val.mse;  // autoencoder validation records MSE only
            row.val_acc = val.accuracy;
        }
        row.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        st.history.push_back(row);
    };
}

/// Full ADMM trainer: the coordinate-descent block schedule with every block
/// solved by its ADMM cycle (Theta blocks, then odd / even x blocks).
inline TrainState train_admm(Network net, const Mat& X0, const Mat& Y, const AdmmOptions& admm,
                             int epochs, std::uint64_t seed, const EpochHook& hook) {
    net.check();
    TrainState st;
    st.seed = seed;
    AuxVars aux = init_aux(net, X0);
    const std::size_t L = net.depth();
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        for (std::size_t l = 1; l <= L; ++l) {
            const Mat& prev = (l == 1) ? X0 : aux.x[l - 2];
            const Mat& tgt = (l < L) ? aux.x[l - 1] : Y;
            admm_theta_block(net, l, prev, tgt, admm);
        }
        for (std::size_t j = 1; j <= L - 1; j += 2) admm_x_block(net, j, aux, X0, Y, admm);
        for (std::size_t j = 2; j <= L - 1; j += 2) admm_x_block(net, j, aux, X0, Y, admm);
        st.epoch = epoch;
        hook(net, epoch, st);
    }
    st.last_aux = std::move(aux.x);
    st.net = std::move(net);
    return st;
}

/// Trains per config and writes metrics.csv, the final model, the resolved
/// config and (for autoencoders) reconstruction grids into out_dir.
inline int run(const RunConfig& cfg) {
    validate(cfg);
    namespace fs = std::filesystem;
    DataSplits ds = load_splits(cfg);

    Network net = init_glorot(cfg.widths, activations_for(cfg), cfg.seed);
    ObjectiveSpec obj;
    obj.lambda.assign(cfg.depth() - 1, cfg.lambda);
    if (cfg.task != Task::Classification && cfg.alpha > 0.0) {
        obj.code_l1 = cfg.alpha;
        obj.code_layer = cfg.resolved_code_layer();
    }

    auto t0 = std::chrono::steady_clock::now();
    EpochHook hook = metrics_hook(cfg, ds, t0);

    auto dispatch = [&](Network start, int first_epoch, int epochs) -> TrainState {
        const Mat& X0 = ds.train.chain_inputs();
        const Mat& Y = ds.train.targets;
        switch (cfg.optimizer) {
            case Optimizer::LBN_S:
            case Optimizer::LBN_D: {
                LbnOptions opt;
                opt.objective = obj;
                opt.epochs = epochs;
                opt.first_epoch = first_epoch;
                opt.batch_size = (cfg.optimizer == Optimizer::LBN_D) ? 0 : cfg.batch_size;
                opt.seed = cfg.seed;
                opt.steps.inner_iters = cfg.inner_iters;
                opt.steps.tau_k = (cfg.optimizer == Optimizer::LBN_D) ? 0.0 : cfg.tau_k;
                opt.steps.tau_b = cfg.tau_b;
                opt.steps.batch_scaled = cfg.batch_scaled;
                opt.steps.tau_w_safety = cfg.tau_w_safety;
                opt.param_reg.rho = cfg.param_reg_l1;
                return train_lbn(std::move(start), X0, Y, opt, hook);
            }
            case Optimizer::PARALLEL: {
                LbnOptions opt;
                opt.objective = obj;
                opt.epochs = epochs;
                opt.first_epoch = first_epoch;
                opt.seed = cfg.seed;
                opt.steps.inner_iters = cfg.inner_iters;
                opt.steps.tau_k = cfg.tau_k;
                opt.steps.tau_b = cfg.tau_b;
                opt.steps.batch_scaled = cfg.batch_scaled;
                opt.steps.tau_w_safety = cfg.tau_w_safety;
                return train_parallel(std::move(start), X0, Y, cfg.workers, opt, hook);
            }
            case Optimizer::GD_BP:
            case Optimizer::SGD_BP:
            case Optimizer::ISGD_BP: {
                SgdOptions opt;
                opt.lr = cfg.lr;
                opt.epochs = epochs;
                opt.first_epoch = first_epoch;
                opt.batch_size = (cfg.optimizer == Optimizer::GD_BP) ? 0 : cfg.batch_size;
                opt.seed = cfg.seed;
                opt.code_l1 = obj.code_l1;
                opt.code_layer = obj.code_layer;
                opt.policy.at_kink = cfg.kink_value;
                opt.tau_k = cfg.tau_k;
                opt.inner_iters = cfg.inner_iters;
                if (cfg.optimizer == Optimizer::GD_BP) return train_gd(std::move(start), X0, Y, opt, hook);
                if (cfg.optimizer == Optimizer::SGD_BP) return train_sgd(std::move(start), X0, Y, opt, hook);
                return train_isgd(std::move(start), X0, Y, opt, hook);
            }
            case Optimizer::CD: {
                TrainState s;
                s.seed = cfg.seed;
                AuxVars aux = init_aux(start, X0);
                for (int e = 0; e < epochs; ++e) {
                    coordinate_descent_epoch(start, obj, X0, Y, aux);
                    s.epoch = first_epoch + e;
                    hook(start, s.epoch, s);
                }
                s.last_aux = std::move(aux.x);
                s.net = std::move(start);
                return s;
            }
            case Optimizer::ADMM: {
                AdmmOptions admm;
                admm.iterations = cfg.inner_iters;
                // Default ridge: a small multiple of the data Gram trace.
                admm.ridge = 1e-6 * X0.squaredNorm();
                return train_admm(std::move(start), X0, Y, admm, epochs, cfg.seed, hook);
            }
        }
        throw std::logic_error("run: unhandled optimizer");
    };

    TrainState st;
    if (cfg.renoise_per_epoch && cfg.task == Task::DenoisingAutoencoder) {
        // fresh corruption per epoch: train one epoch at a time
        std::vector<MetricsRow> rows;
        Network cur = std::move(net);
        for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
            renoise(ds.train, cfg.noise_std, cfg.seed, epoch);
            st = dispatch(std::move(cur), epoch, 1);
            cur = std::move(st.net);
            for (const auto& r : st.history) rows.push_back(r);
        }
        st.net = std::move(cur);
        st.history = std::move(rows);
    } else {
        st = dispatch(std::move(net), 1, cfg.epochs);
    }

    fs::create_directories(cfg.out_dir);
    write_metrics_csv(cfg.out_dir + "/metrics.csv", st.history);
    save_model(st.net, cfg.out_dir + "/model.lbn");
    {
        std::ofstream f(cfg.out_dir + "/config.txt", std::ios::binary);
        f << config_to_string(cfg);
    }
    if (cfg.task != Task::Classification) {
        detail::write_reconstructions(st.net, ds.train, cfg.out_dir + "/recon_train.pgm");
        detail::write_reconstructions(st.net, ds.val, cfg.out_dir + "/recon_val.pgm");
    }
    return 0;
}

/// Loads a model and reports metrics on the validation split.
inline EvalReport evaluate(const std::string& model_path, const std::string& data_dir,
                           const std::string& dataset, Task task, double code_l1 = 0.0,
                           int code_layer = 0) {
    Network net = load_model(model_path);
    RunConfig c;
    c.task = task;
    c.dataset = dataset;
    c.data_dir = data_dir;
    for (std::size_t l = 0; l < net.depth(); ++l) {
        if (l == 0) c.widths.push_back(net.layers[l].in_dim());
        c.widths.push_back(net.layers[l].out_dim());
    }
    DataSplits ds = load_splits(c);
    if (ds.val.inputs.rows() != net.in_dim())
        throw std::runtime_error("evaluate: model input width does not match dataset");
    if (code_layer == 0 && task != Task::Classification) code_layer = static_cast<int>(net.depth() / 2);
    return evaluate_net(net, ds.val, task, code_l1, code_layer);
}

// ---------------------------------------------------------------------------
// compare: merged long-format CSV plus simple line-plot images.

namespace detail {

struct Plot {
    Index w = 800, h = 520;
    std::vector<std::uint8_t> rgb;
    Plot() : rgb(static_cast<std::size_t>(w * h * 3), 255) {}

    void put(Index x, Index y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        if (x < 0 || y < 0 || x >= w || y >= h) return;
        std::size_t o = static_cast<std::size_t>((y * w + x) * 3);
        rgb[o] = r; rgb[o + 1] = g; rgb[o + 2] = b;
    }
    void line(Index x0, Index y0, Index x1, Index y1, std::uint8_t r, std::uint8_t g,
              std::uint8_t b) {
        Index dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
        Index sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1, err = dx + dy;
        for (;;) {
            put(x0, y0, r, g, b);
            if (x0 == x1 && y0 == y1) break;
            Index e2 = 2 * err;
            if (e2 >= dy) { err += dy; x0 += sx; }
            if (e2 <= dx) { err += dx; y0 += sy; }
        }
    }
};

inline const std::uint8_t kPalette[][3] = {
    {31, 119, 180}, {255, 127, 14}, {44, 160, 44}, {214, 39, 40},
    {148, 103, 189}, {140, 86, 75}, {227, 119, 194}, {127, 127, 127},
};

/// Draws per-run curves of one metric column against epoch.
inline void plot_metric(const std::vector<std::pair<std::string, CsvTable>>& runs,
                        const std::string& column, const std::string& path) {
    Plot p;
    const Index mL = 60, mR = 20, mT = 20, mB = 40;
    p.line(mL, p.h - mB, p.w - mR, p.h - mB, 0, 0, 0);
    p.line(mL, mT, mL, p.h - mB, 0, 0, 0);

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    std::vector<std::vector<std::pair<double, double>>> series;
    for (const auto& [name, t] : runs) {
        (void)name;
        std::vector<std::pair<double, double>> pts;
        int ce = t.column("epoch"), cv = t.column(column);
        if (ce < 0 || cv < 0) { series.push_back(pts); continue; }
        for (const auto& row : t.rows) {
            if (static_cast<int>(row.size()) <= std::max(ce, cv)) continue;
            if (row[static_cast<std::size_t>(cv)].empty()) continue;
            double x = std::stod(row[static_cast<std::size_t>(ce)]);
            double y = std::stod(row[static_cast<std::size_t>(cv)]);
            pts.emplace_back(x, y);
            xmin = std::min(xmin, x); xmax = std::max(xmax, x);
            ymin = std::min(ymin, y); ymax = std::max(ymax, y);
        }
        series.push_back(std::move(pts));
    }
    if (xmax <= xmin) { xmin = 0; xmax = 1; }
    if (ymax <= ymin) { ymin -= 0.5; ymax += 0.5; }
    auto X = [&](double x) { return mL + static_cast<Index>((x - xmin) / (xmax - xmin) * (p.w - mL - mR)); };
    auto Y = [&](double y) { return p.h - mB - static_cast<Index>((y - ymin) / (ymax - ymin) * (p.h - mT - mB)); };
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto* col = kPalette[s % 8];
        for (std::size_t i = 1; i < series[s].size(); ++i) {
            auto [x0, y0] = series[s][i - 1];
            auto [x1, y1] = series[s][i];
            p.line(X(x0), Y(y0), X(x1), Y(y1), col[0], col[1], col[2]);
        }
        // legend swatch
        for (Index dy = 0; dy < 8; ++dy)
            for (Index dx = 0; dx < 8; ++dx)
                p.put(mL + 10 + static_cast<Index>(s) * 20 + dx, mT + dy, col[0], col[1], col[2]);
    }
    write_ppm(path, p.rgb, p.w, p.h);
}

}  // namespace detail

/// Merges run metrics into one long-format CSV (blank cells where a run lacks
/// an epoch or column) and renders objective/sparsity curves as image files.
inline int compare(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::vector<std::pair<std::string, CsvTable>> runs;
    for (const auto& dir : run_dirs) {
        CsvTable t = read_csv(dir + "/metrics.csv");
        if (t.column("epoch") < 0) throw std::runtime_error("compare: missing epoch column in " + dir);
        runs.emplace_back(fs::path(dir).filename().string(), std::move(t));
    }
    fs::create_directories(out_dir);
    {
        std::ofstream f(out_dir + "/merged.csv", std::ios::binary);
        f << "run," << kMetricsHeader << '\n';
        for (const auto& [name, t] : runs) {
            for (const auto& row : t.rows) {
                f << name;
                const std::size_t ncols = 10;
                for (std::size_t i = 0; i < ncols; ++i)
                    f << ',' << (i < row.size() ? row[i] : std::string());
                f << '\n';
            }
        }
    }
    detail::plot_metric(runs, "train_objective", out_dir + "/objective.ppm");
    detail::plot_metric(runs, "sparsity", out_dir + "/sparsity.ppm");
    std::cout << "compare: wrote " << out_dir << "/merged.csv, objective.ppm, sparsity.ppm\n";
    for (std::size_t s = 0; s < runs.size(); ++s)
        std::cout << "  color " << s << " -> " << runs[s].first << "\n";
    return 0;
}

}  // namespace lbn
