#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lbn/data.hpp"
#include "oracles.hpp"

using namespace lbn;

namespace {

void write_be32(std::ofstream& f, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    f.write(reinterpret_cast<char*>(b), 4);
}

struct TempIdx {
    std::string images, labels;
    TempIdx(std::uint32_t magic_img, std::uint32_t magic_lab, std::uint32_t count,
            std::uint32_t rows, std::uint32_t cols, const std::vector<std::uint8_t>& pix,
            const std::vector<std::uint8_t>& lab, bool truncate_pixels = false) {
        namespace fs = std::filesystem;
        static int counter = 0;
        std::string base = (fs::temp_directory_path() / ("lbn_idx_" + std::to_string(counter++))).string();
        images = base + "-images";
        labels = base + "-labels";
        {
            std::ofstream f(images, std::ios::binary);
            write_be32(f, magic_img);
            write_be32(f, count);
            write_be32(f, rows);
            write_be32(f, cols);
            std::size_t n = pix.size();
            if (truncate_pixels && n > 2) n -= 2;
            f.write(reinterpret_cast<const char*>(pix.data()), static_cast<std::streamsize>(n));
        }
        {
            std::ofstream f(labels, std::ios::binary);
            write_be32(f, magic_lab);
            write_be32(f, static_cast<std::uint32_t>(lab.size()));
            f.write(reinterpret_cast<const char*>(lab.data()), static_cast<std::streamsize>(lab.size()));
        }
    }
    ~TempIdx() {
        std::remove(images.c_str());
        std::remove(labels.c_str());
    }
};

}  // namespace

TEST_CASE("idx loading", "[data]") {
    SECTION("two 2x2 images parse with /255 scaling") {
        std::vector<std::uint8_t> pix = {0, 51, 102, 153, 204, 255, 0, 128};
        TempIdx t(0x803, 0x801, 2, 2, 2, pix, {3, 7});
        RawIdx raw = load_idx(t.images, t.labels);
        REQUIRE(raw.count == 2);
        REQUIRE(raw.rows == 2);
        REQUIRE(raw.cols == 2);
        REQUIRE(raw.images(0, 0) == Approx(0.0));
        REQUIRE(raw.images(1, 0) == Approx(51.0 / 255.0));
        REQUIRE(raw.images(1, 1) == Approx(1.0));
        REQUIRE(raw.labels[0] == 3);
        REQUIRE(raw.labels[1] == 7);
    }
    SECTION("wrong magic numbers are rejected") {
        std::vector<std::uint8_t> pix(8, 0);
        TempIdx t1(0x802, 0x801, 2, 2, 2, pix, {0, 1});
        REQUIRE_THROWS_WITH(load_idx(t1.images, t1.labels), Catch::Contains("magic"));
        TempIdx t2(0x803, 0x802, 2, 2, 2, pix, {0, 1});
        REQUIRE_THROWS_WITH(load_idx(t2.images, t2.labels), Catch::Contains("magic"));
    }
    SECTION("count mismatch and truncation are rejected") {
        std::vector<std::uint8_t> pix(8, 0);
        TempIdx t1(0x803, 0x801, 2, 2, 2, pix, {0, 1, 2});
        REQUIRE_THROWS_WITH(load_idx(t1.images, t1.labels), Catch::Contains("mismatch"));
        TempIdx t2(0x803, 0x801, 2, 2, 2, pix, {0, 1}, /*truncate=*/true);
        REQUIRE_THROWS_WITH(load_idx(t2.images, t2.labels), Catch::Contains("truncated"));
    }
    SECTION("loading the same files twice is identical") {
        std::vector<std::uint8_t> pix = {9, 18, 27, 36, 45, 54, 63, 72};
        TempIdx t(0x803, 0x801, 2, 2, 2, pix, {1, 2});
        RawIdx a = load_idx(t.images, t.labels);
        RawIdx b = load_idx(t.images, t.labels);
        REQUIRE(a.images == b.images);
        REQUIRE(a.labels == b.labels);
    }
}

TEST_CASE("preprocess", "[data]") {
    RawIdx raw;
    raw.rows = 2;
    raw.cols = 1;
    raw.count = 4;
    raw.images.resize(2, 4);
    raw.images << 0.0, 0.5, 1.0, 0.5, 0.2, 0.4, 0.6, 0.8;
    raw.labels = {3, 1, 0, 9};

    SECTION("centering with the training mean") {
        Vec mean = mean_image_of(raw);
        PreprocessOptions opt;
        Dataset ds = preprocess(raw, mean, opt, 1, "t");
        REQUIRE(ds.inputs.rowwise().mean().lpNorm<Eigen::Infinity>() <= 1e-9);
        REQUIRE(ds.mean_image == mean);
    }
    SECTION("constant-zero images stay zero after centering") {
        RawIdx zeros = raw;
        zeros.images.setZero();
        Dataset ds = preprocess(zeros, mean_image_of(zeros), {}, 1, "t");
        REQUIRE(ds.inputs.norm() == 0.0);
    }
    SECTION("one-hot encoding") {
        Dataset ds = preprocess(raw, mean_image_of(raw), {}, 1, "t");
        REQUIRE(ds.targets.rows() == 10);
        REQUIRE(ds.targets(3, 0) == 1.0);
        REQUIRE(ds.targets.col(0).sum() == 1.0);
        REQUIRE(ds.targets(9, 3) == 1.0);
    }
    SECTION("clean-image targets for autoencoders") {
        PreprocessOptions opt;
        opt.target = TargetKind::CleanImage;
        Dataset ds = preprocess(raw, mean_image_of(raw), opt, 1, "t");
        REQUIRE(ds.targets == ds.inputs);
        REQUIRE_FALSE(ds.noisy_inputs.has_value());
    }
    SECTION("noise statistics and determinism") {
        RawIdx big;
        big.rows = 100;
        big.cols = 100;
        big.count = 100;  // 1e6 pixels
        big.images = Mat::Zero(10000, 100);
        big.labels.assign(100, 0);
        PreprocessOptions opt;
        opt.target = TargetKind::CleanImage;
        opt.add_noise = true;
        opt.noise_std = 1e-3;
        Dataset ds = preprocess(big, mean_image_of(big), opt, 42, "t");
        REQUIRE(ds.noisy_inputs.has_value());
        const Mat& noise = *ds.noisy_inputs;  // inputs are all zero
        double mean = noise.mean();
        double var = (noise.array() - mean).square().sum() / static_cast<double>(noise.size());
        REQUIRE(std::sqrt(var) == Approx(1e-3).epsilon(0.02));
        Dataset ds2 = preprocess(big, mean_image_of(big), opt, 42, "t");
        REQUIRE(*ds2.noisy_inputs == noise);
    }
}

TEST_CASE("subsample", "[data]") {
    RawIdx raw;
    raw.rows = 1;
    raw.cols = 1;
    raw.count = 50;
    raw.images.resize(1, 50);
    for (Index i = 0; i < 50; ++i) raw.images(0, i) = i / 50.0;
    raw.labels.resize(50);
    for (int i = 0; i < 50; ++i) raw.labels[static_cast<std::size_t>(i)] = i % 10;
    Dataset ds = preprocess(raw, Vec::Zero(1), {}, 1, "t");

    SECTION("n equal to size is a permutation") {
        Dataset sub = subsample(ds, 50, 3);
        std::vector<int> ids = sub.ids;
        std::sort(ids.begin(), ids.end());
        for (int i = 0; i < 50; ++i) REQUIRE(ids[static_cast<std::size_t>(i)] == i);
    }
    SECTION("deterministic and distinct") {
        Dataset a = subsample(ds, 10, 4);
        Dataset b = subsample(ds, 10, 4);
        REQUIRE(a.ids == b.ids);
        std::vector<int> ids = a.ids;
        std::sort(ids.begin(), ids.end());
        REQUIRE(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
        REQUIRE(a.inputs == b.inputs);
    }
    SECTION("oversampling is rejected") {
        REQUIRE_THROWS_AS(subsample(ds, 51, 1), std::invalid_argument);
    }
}

TEST_CASE("batches", "[data]") {
    SECTION("s=4, batch=2 gives two disjoint covering pairs") {
        auto bs = batches(4, 2, 1, 0);
        REQUIRE(bs.size() == 2);
        std::vector<int> all;
        for (const auto& b : bs) all.insert(all.end(), b.begin(), b.end());
        std::sort(all.begin(), all.end());
        REQUIRE(all == std::vector<int>({0, 1, 2, 3}));
    }
    SECTION("s=5, batch=2 gives sizes 2,2,1") {
        auto bs = batches(5, 2, 1, 0);
        REQUIRE(bs.size() == 3);
        REQUIRE(bs[0].size() == 2);
        REQUIRE(bs[2].size() == 1);
    }
    SECTION("partition property over many shapes") {
        for (Index s = 1; s <= 20; ++s)
            for (Index bs = 1; bs <= s; ++bs) {
                auto parts = batches(s, bs, 7, 3);
                std::vector<int> all;
                for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
                std::sort(all.begin(), all.end());
                REQUIRE(static_cast<Index>(all.size()) == s);
                for (Index i = 0; i < s; ++i) REQUIRE(all[static_cast<std::size_t>(i)] == i);
            }
    }
    SECTION("epoch changes the permutation, seed pins it") {
        auto a = batches(16, 4, 5, 1);
        auto b = batches(16, 4, 5, 2);
        auto c = batches(16, 4, 5, 1);
        REQUIRE(a == c);
        REQUIRE(a != b);
    }
    SECTION("partition_m splits into exactly m near-equal parts") {
        auto parts = partition_m(10, 3, 1, 0);
        REQUIRE(parts.size() == 3);
        REQUIRE(parts[0].size() == 4);
        REQUIRE(parts[1].size() == 3);
        REQUIRE(parts[2].size() == 3);
    }
}
