// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbn/linalg.hpp"
#include "lbn/rng.hpp"

namespace lbn {

/// Raw IDX image/label pair, pixels scaled to [0,1].
struct RawIdx {
    Index rows = 0, cols = 0;
    Index count = 0;
    Mat images;               // (rows*cols) x count
    std::vector<int> labels;  // 0..9
};

namespace detail {

inline std::uint32_t read_u32_be(std::istream& in, const std::string& what) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw std::runtime_error("load_idx: truncated file while reading " + what);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace detail

/// Parses the IDX pair: big-endian headers, magic 0x00000803 for images
/// (count, rows, cols; u8 pixels) and 0x00000801 for labels (u8), pixels
/// scaled to [0,1] by /255.
inline RawIdx load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream fi(images_path, std::ios::binary);
    if (!fi) throw std::runtime_error("load_idx: cannot open " + images_path);
    if (detail::read_u32_be(fi, "image magic") != 0x00000803u)
        throw std::runtime_error("load_idx: wrong magic in " + images_path);
    RawIdx raw;
    raw.count = detail::read_u32_be(fi, "image count");
    raw.rows = detail::read_u32_be(fi, "image rows");
    raw.cols = detail::read_u32_be(fi, "image cols");
    const std::size_t npix = static_cast<std::size_t>(raw.count) * raw.rows * raw.cols;
    std::vector<std::uint8_t> pix(npix);
    if (!fi.read(reinterpret_cast<char*>(pix.data()), static_cast<std::streamsize>(npix)))
        throw std::runtime_error("load_idx: truncated pixel data in " + images_path);

    std::ifstream fl(labels_path, std::ios::binary);
    if (!fl) throw std::runtime_error("load_idx: cannot open " + labels_path);
    if (detail::read_u32_be(fl, "label magic") != 0x00000801u)
        throw std::runtime_error("load_idx: wrong magic in " + labels_path);
    Index lcount = detail::read_u32_be(fl, "label count");
    if (lcount != raw.count)
        throw std::runtime_error("load_idx: image/label count mismatch");
    std::vector<std::uint8_t> lab(static_cast<std::size_t>(lcount));
    if (!fl.read(reinterpret_cast<char*>(lab.data()), lcount))
        throw std::runtime_error("load_idx: truncated label data in " + labels_path);

    raw.images.resize(raw.rows * raw.cols, raw.count);
    for (Index i = 0; i < raw.count; ++i)
        for (Index p = 0; p < raw.rows * raw.cols; ++p)
            raw.images(p, i) = pix[static_cast<std::size_t>(i) * raw.rows * raw.cols + p] / 255.0;
    raw.labels.assign(lab.begin(), lab.end());
    return raw;
}

/// Preprocessed dataset; columns are samples. `inputs` are centered clean
/// images; `noisy_inputs` holds the fixed corrupted copies for denoising.
struct Dataset {
    Mat inputs;
    Mat targets;               // one-hot (classification) or clean images
    std::optional<Mat> noisy_inputs;
    std::vector<int> labels;   // classification only
    std::vector<int> ids;
    Vec mean_image;            // training mean used for centering
    Index img_rows = 0, img_cols = 0;
    std::string name;

    Index size() const { return inputs.cols(); }
    /// Chain input for training/evaluation (corrupted copy when present).
    const Mat& chain_inputs() const { return noisy_inputs ? *noisy_inputs : inputs; }
};

enum class TargetKind { OneHot, CleanImage };

struct PreprocessOptions {
    TargetKind target = TargetKind::OneHot;
    bool add_noise = false;
    double noise_std = 1e-3;
    bool rescale01 = true;  // false keeps the raw 0..255 byte scale
    int num_classes = 10;
};

/// Centers with the supplied mean image (training mean for both splits),
/// one-hot encodes labels or copies clean images as targets and, for
/// denoising, adds seeded Gaussian noise once (fixed corrupted dataset).
inline Dataset preprocess(const RawIdx& raw, const Vec& mean_image, const PreprocessOptions& opt,
                          std::uint64_t noise_seed, const std::string& name) {
    Dataset ds;
    ds.name = name;
    ds.img_rows = raw.rows;
    ds.img_cols = raw.cols;
    ds.mean_image = opt.rescale01 ? mean_image : Vec(255.0 * mean_image);
    ds.inputs = raw.images.colwise() - mean_image;
    if (!opt.rescale01) ds.inputs *= 255.0;  // undo load_idx's [0,1] scaling
    ds.labels = raw.labels;
    ds.ids.resize(static_cast<std::size_t>(raw.count));
    std::iota(ds.ids.begin(), ds.ids.end(), 0);
    if (opt.target == TargetKind::OneHot) {
        ds.targets = Mat::Zero(opt.num_classes, raw.count);
        for (Index i = 0; i < raw.count; ++i) {
            int y = raw.labels[static_cast<std::size_t>(i)];
            if (y < 0 || y >= opt.num_classes)
                throw std::runtime_error("preprocess: label out of range");
            ds.targets(y, i) = 1.0;
        }
    } else {
        ds.targets = ds.inputs;
    }
    if (opt.add_noise) {
        Rng rng(noise_seed);
        Mat noisy = ds.inputs;
        for (Index i = 0; i < noisy.cols(); ++i)
            for (Index p = 0; p < noisy.rows(); ++p)
                noisy(p, i) += opt.noise_std * rng.normal();
        ds.noisy_inputs = std::move(noisy);
    }
    return ds;
}

inline Vec mean_image_of(const RawIdx& raw) {
    return raw.images.rowwise().mean();
}

/// Re-samples the corrupted copies from a fresh per-epoch stream (the
/// alternative to the default fixed corrupted dataset).
inline void renoise(Dataset& ds, double noise_std, std::uint64_t seed, int epoch) {
    Rng rng(mix_seed(seed, 0x4e015e00ull + static_cast<std::uint64_t>(epoch)));
    Mat noisy = ds.inputs;
    for (Index i = 0; i < noisy.cols(); ++i)
        for (Index p = 0; p < noisy.rows(); ++p) noisy(p, i) += noise_std * rng.normal();
    ds.noisy_inputs = std::move(noisy);
}

/// Uniform subsample without replacement, deterministic in the seed.
inline Dataset subsample(const Dataset& ds, Index n, std::uint64_t seed) {
    if (n > ds.size()) throw std::invalid_argument("subsample: n exceeds dataset size");
    std::vector<int> perm(static_cast<std::size_t>(ds.size()));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(mix_seed(seed, 0x5ull));
    rng.shuffle(perm);
    perm.resize(static_cast<std::size_t>(n));
    Dataset out;
    out.name = ds.name;
    out.img_rows = ds.img_rows;
    out.img_cols = ds.img_cols;
    out.mean_image = ds.mean_image;
    out.inputs.resize(ds.inputs.rows(), n);
    out.targets.resize(ds.targets.rows(), n);
    if (ds.noisy_inputs) out.noisy_inputs = Mat(ds.noisy_inputs->rows(), n);
    for (Index i = 0; i < n; ++i) {
        int src = perm[static_cast<std::size_t>(i)];
        out.inputs.col(i) = ds.inputs.col(src);
        out.targets.col(i) = ds.targets.col(src);
        if (ds.noisy_inputs) out.noisy_inputs->col(i) = ds.noisy_inputs->col(src);
        if (!ds.labels.empty()) out.labels.push_back(ds.labels[static_cast<std::size_t>(src)]);
        out.ids.push_back(ds.ids[static_cast<std::size_t>(src)]);
    }
    return out;
}

/// Randomized disjoint batches covering {0..s-1}, reshuffled per epoch from
/// the seeded stream; the last batch may be smaller.
inline std::vector<std::vector<int>> batches(Index s, Index batch_size, std::uint64_t seed,
                                             int epoch) {
    if (batch_size < 1) throw std::invalid_argument("batches: batch_size must be >= 1");
    std::vector<int> perm(static_cast<std::size_t>(s));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(mix_seed(seed, 0xba7c000ull + static_cast<std::uint64_t>(epoch)));
    rng.shuffle(perm);
    std::vector<std::vector<int>> out;
    for (Index start = 0; start < s; start += batch_size) {
        Index end = std::min(s, start + batch_size);
        out.emplace_back(perm.begin() + start, perm.begin() + end);
    }
    return out;
}

/// Splits {0..s-1} into exactly m nearly-equal randomized parts (for the
/// data-parallel trainer); m = 1 gives the same single batch as
/// batches(s, s, ...).
inline std::vector<std::vector<int>> partition_m(Index s, int m, std::uint64_t seed, int epoch) {
    if (m < 1) throw std::invalid_argument("partition_m: m must be >= 1");
    if (static_cast<Index>(m) > s) throw std::invalid_argument("partition_m: more parts than samples");
    std::vector<int> perm(static_cast<std::size_t>(s));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(mix_seed(seed, 0xba7c000ull + static_cast<std::uint64_t>(epoch)));
    rng.shuffle(perm);
    std::vector<std::vector<int>> out;
    Index base = s / m, extra = s % m, pos = 0;
    for (int p = 0; p < m; ++p) {
        Index len = base + (p < extra ? 1 : 0);
        out.emplace_back(perm.begin() + pos, perm.begin() + pos + len);
        pos += len;
    }
    return out;
}

/// Gathers the listed columns of a matrix.
inline Mat gather_cols(const Mat& M, const std::vector<int>& idx) {
    Mat out(M.rows(), static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Index>(i)) = M.col(idx[i]);
    return out;
}

}  // namespace lbn
