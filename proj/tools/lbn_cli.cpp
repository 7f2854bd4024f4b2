// lbn - lifted Bregman training of feed-forward networks
// Copyright 2026 The lbn Authors
// Licensed under Apache 2.0

#include <CLI11.hpp>
#include <iostream>

#include "lbn/lbn.hpp"

int main(int argc, char** argv) {
    CLI::App app{"lbn: lifted Bregman training of feed-forward networks"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "Train a model from a preset or config file");
    std::string preset, config_file, data_dir, out_dir = "run";
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;
    train->add_option("--preset", preset, "Built-in preset name");
    train->add_option("--config", config_file, "Flat key=value config file");
    train->add_option("--set", sets, "Overrides, key=value (repeatable)");
    train->add_option("--data", data_dir, "Dataset directory (default: $DATA_DIR or ./data)");
    train->add_option("--out", out_dir, "Output directory");
    train->add_option("--seed", seed, "Random seed")->each([&](const std::string&) { seed_given = true; });

    auto* presets = app.add_subcommand("presets", "List built-in presets");

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a saved model on the validation split");
    std::string model_path, eval_data, eval_dataset = "mnist", eval_task = "classification";
    double eval_alpha = 0.0;
    eval->add_option("--model", model_path, "Model file (LBN1)")->required();
    eval->add_option("--data", eval_data, "Dataset directory");
    eval->add_option("--dataset", eval_dataset, "mnist | fashion-mnist");
    eval->add_option("--task", eval_task, "classification | autoencoder | denoising-autoencoder");
    eval->add_option("--alpha", eval_alpha, "Code l1 weight for the reported objective");

    // compare
    auto* cmp = app.add_subcommand("compare", "Merge run metrics and plot curves");
    std::vector<std::string> run_dirs;
    std::string cmp_out = "compare";
    cmp->add_option("dirs", run_dirs, "Run output directories")->required();
    cmp->add_option("--out", cmp_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*presets) {
            for (const auto& n : lbn::preset_names()) std::cout << n << "\n";
            return 0;
        }
        if (*train) {
            lbn::RunConfig cfg;
            if (!preset.empty()) cfg = lbn::preset_config(preset);
            if (!config_file.empty()) lbn::config_load_file(cfg, config_file);
            if (preset.empty() && config_file.empty()) {
                std::cerr << "train: need --preset or --config\n";
                return 2;
            }
            for (const auto& kv : sets) {
                auto eq = kv.find('=');
                if (eq == std::string::npos) {
                    std::cerr << "train: --set expects key=value, got " << kv << "\n";
                    return 2;
                }
                lbn::config_set(cfg, kv.substr(0, eq), kv.substr(eq + 1));
            }
            if (!data_dir.empty()) cfg.data_dir = data_dir;
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (seed_given) cfg.seed = seed;
            return lbn::run(cfg);
        }
        if (*eval) {
            auto rep = lbn::evaluate(model_path, lbn::resolve_data_dir(eval_data), eval_dataset,
                                     lbn::task_from(eval_task), eval_alpha);
            std::cout << "objective " << rep.objective << "\n";
            std::cout << "mse " << rep.mse << "\n";
            if (rep.accuracy) std::cout << "accuracy " << *rep.accuracy << "\n";
            if (rep.sparsity) std::cout << "sparsity " << *rep.sparsity << "\n";
            for (std::size_t l = 0; l < rep.linear_rates.size(); ++l)
                if (rep.linear_rates[l])
                    std::cout << "linear_rate_l" << (l + 1) << " " << *rep.linear_rates[l] << "\n";
            return 0;
        }
        if (*cmp) return lbn::compare(run_dirs, cmp_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
