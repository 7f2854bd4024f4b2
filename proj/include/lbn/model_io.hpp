// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "lbn/network.hpp"

namespace lbn {

// Model container: magic "LBN1", u32 version, u32 layer count, then per layer
// u32 in, u32 out, u8 potential tag, f64 alpha, row-major f64 weights, f64
// biases. Little-endian, version 1.

namespace detail {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_pod(std::istream& is, T& v, const char* what) {
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
        throw std::runtime_error(std::string("load_model: truncated at ") + what);
}

}  // namespace detail

inline void save_model(const Network& net, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_model: cannot open " + path);
    f.write("LBN1", 4);
    detail::write_pod(f, std::uint32_t{1});
    detail::write_pod(f, static_cast<std::uint32_t>(net.depth()));
    for (const Layer& ly : net.layers) {
        detail::write_pod(f, static_cast<std::uint32_t>(ly.in_dim()));
        detail::write_pod(f, static_cast<std::uint32_t>(ly.out_dim()));
        detail::write_pod(f, static_cast<std::uint8_t>(ly.act.kind));
        detail::write_pod(f, ly.act.alpha);
        for (Index i = 0; i < ly.W.rows(); ++i)
            for (Index j = 0; j < ly.W.cols(); ++j) detail::write_pod(f, ly.W(i, j));
        for (Index j = 0; j < ly.b.size(); ++j) detail::write_pod(f, ly.b[j]);
    }
    if (!f) throw std::runtime_error("save_model: write failed for " + path);
}

inline Network load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_model: cannot open " + path);
    char magic[4];
    if (!f.read(magic, 4) || std::memcmp(magic, "LBN1", 4) != 0)
        throw std::runtime_error("load_model: bad magic in " + path);
    std::uint32_t version = 0, L = 0;
    detail::read_pod(f, version, "version");
    if (version != 1) throw std::runtime_error("load_model: unsupported version");
    detail::read_pod(f, L, "layer count");
    Network net;
    for (std::uint32_t l = 0; l < L; ++l) {
        std::uint32_t in = 0, out = 0;
        std::uint8_t kind = 0;
        double alpha = 0.0;
        detail::read_pod(f, in, "in dim");
        detail::read_pod(f, out, "out dim");
        detail::read_pod(f, kind, "potential tag");
        detail::read_pod(f, alpha, "alpha");
        if (kind > static_cast<std::uint8_t>(PotentialKind::Zero))
            throw std::runtime_error("load_model: unknown potential tag");
        Layer ly;
        ly.act = ProxSpec{static_cast<PotentialKind>(kind), alpha};
        ly.W.resize(in, out);
        for (std::uint32_t i = 0; i < in; ++i)
            for (std::uint32_t j = 0; j < out; ++j) detail::read_pod(f, ly.W(i, j), "weights");
        ly.b.resize(out);
        for (std::uint32_t j = 0; j < out; ++j) detail::read_pod(f, ly.b[j], "bias");
        net.layers.push_back(std::move(ly));
    }
    net.check();
    return net;
}

/// 8-bit binary PGM, values clamped to [0,1].
inline void write_pgm(const std::string& path, const Mat& img01) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_pgm: cannot open " + path);
    f << "P5\n" << img01.cols() << " " << img01.rows() << "\n255\n";
    for (Index r = 0; r < img01.rows(); ++r)
        for (Index c = 0; c < img01.cols(); ++c) {
            double v = std::min(1.0, std::max(0.0, img01(r, c)));
            f.put(static_cast<char>(static_cast<int>(v * 255.0 + 0.5)));
        }
}

/// 24-bit binary PPM.
inline void write_ppm(const std::string& path, const std::vector<std::uint8_t>& rgb, Index w,
                      Index h) {
    if (static_cast<Index>(rgb.size()) != w * h * 3)
        throw std::invalid_argument("write_ppm: buffer size mismatch");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_ppm: cannot open " + path);
    f << "P6\n" << w << " " << h << "\n255\n";
    f.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
}

}  // namespace lbn
