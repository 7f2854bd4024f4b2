// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lbn {

/// One row of per-epoch metrics. For autoencoders val_objective records the
/// MSE loss only; fields that do not apply stay empty in the CSV.
struct MetricsRow {
    int epoch = 0;
    double train_objective = 0.0;
    std::optional<double> val_objective;
    std::optional<double> train_acc;
    std::optional<double> val_acc;
    std::optional<double> sparsity;
    std::array<std::optional<double>, 3> linear_rate;  // hidden layers 1..3
    double wall_time_s = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "epoch,train_objective,val_objective,train_acc,val_acc,sparsity,"
    "linear_rate_l1,linear_rate_l2,linear_rate_l3,wall_time_s";

namespace detail {

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt_g17(*v) : std::string();
}

}  // namespace detail

inline std::string metrics_csv_line(const MetricsRow& r) {
    std::string out = std::to_string(r.epoch);
    out += ',' + detail::fmt_g17(r.train_objective);
    out += ',' + detail::fmt_opt(r.val_objective);
    out += ',' + detail::fmt_opt(r.train_acc);
    out += ',' + detail::fmt_opt(r.val_acc);
    out += ',' + detail::fmt_opt(r.sparsity);
    for (const auto& lr : r.linear_rate) out += ',' + detail::fmt_opt(lr);
    out += ',' + detail::fmt_g17(r.wall_time_s);
    return out;
}

inline void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
    std::ofstream f(path, std::ios::binary);  // fixed \n endings on every platform
    if (!f) throw std::runtime_error("write_metrics_csv: cannot open " + path);
    f << kMetricsHeader << '\n';
    for (const auto& r : rows) f << metrics_csv_line(r) << '\n';
}

/// Minimal reader for compare/eval tooling; keeps raw cells as strings.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_csv: cannot open " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> cells;
        std::string cell;
        std::stringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.empty()) continue;
        if (!line.empty() && line.back() == ',') cells.push_back("");
        if (first) { t.header = cells; first = false; }
        else t.rows.push_back(cells);
    }
    return t;
}

}  // namespace lbn
