// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

// sharpv command-line harness: run / bench / gen.
// Exit codes: 0 success, 2 config error, 3 I/O error, 4 invariant violation.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sharpv/error.hpp"
#include "sharpv/harness.hpp"
#include "sharpv/tensor_io.hpp"

namespace {

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw sharpv::IoError("cannot open config file " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw sharpv::ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
}

void emit(const std::string& text, const std::optional<std::string>& path) {
    if (!path) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(*path, std::ios::trunc);
    out << text << '\n';
    out.flush();
    if (!out) {
        throw sharpv::IoError("cannot write " + *path);
    }
}

// Flags given on the command line; each is applied only when present so that
// config-file values survive underneath.
struct RunFlags {
    std::string pattern, mode, input, output, config;
    double rate = 0, w = 0, k = 0, m = 0;
    std::vector<std::size_t> burst_frames;
    std::size_t n = 0, f = 0, d = 0, decode_steps = 0, layers = 0, model_dim = 0, heads = 0;
    std::uint64_t seed = 0;
    bool no_visual_pruning = false;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Training-free visual token and KV-cache pruning on a toy video decoder"};
    app.require_subcommand(1);

    RunFlags rf;
    auto* run = app.add_subcommand("run", "Run the two-stage pruning pipeline and print a JSON report");
    auto* o_pattern = run->add_option("--pattern", rf.pattern, "static | uniform_motion | burst | mixed");
    auto* o_rate = run->add_option("--rate", rf.rate, "uniform_motion rotation per frame, in units of pi");
    auto* o_burst = run->add_option("--burst-frames", rf.burst_frames, "0-based burst frame indices")->delimiter(',');
    auto* o_n = run->add_option("--n", rf.n, "frames");
    auto* o_f = run->add_option("--f", rf.f, "tokens per frame");
    auto* o_d = run->add_option("--d", rf.d, "token dimension");
    auto* o_seed = run->add_option("--seed", rf.seed, "video and prompt seed");
    auto* o_mode = run->add_option("--mode", rf.mode, "adaptive | manual");
    auto* o_w = run->add_option("--w", rf.w, "spatial weight in the combined score");
    auto* o_k = run->add_option("--k", rf.k, "manual-mode importance threshold");
    auto* o_m = run->add_option("--m", rf.m, "degradation threshold for KV eviction");
    auto* o_steps = run->add_option("--decode-steps", rf.decode_steps, "tokens to generate");
    auto* o_in = run->add_option("--in", rf.input, "SHRPVID1 tensor file instead of a synthetic video");
    auto* o_out = run->add_option("--out", rf.output, "report path (default stdout)");
    run->add_option("--config", rf.config, "JSON config file");
    auto* o_layers = run->add_option("--layers", rf.layers, "decoder layers");
    auto* o_model_dim = run->add_option("--model-dim", rf.model_dim, "decoder width");
    auto* o_heads = run->add_option("--heads", rf.heads, "attention heads");
    auto* o_no_visual = run->add_flag("--no-visual-pruning", rf.no_visual_pruning, "keep every visual token");

    sharpv::BenchConfig bench_cfg;
    std::string bench_out;
    auto* bench = app.add_subcommand("bench", "Time visual scoring across a size ladder and report cache bytes");
    bench->add_option("--n", bench_cfg.n, "base frame count");
    bench->add_option("--f", bench_cfg.f, "tokens per frame");
    bench->add_option("--d", bench_cfg.d, "base token dimension");
    bench->add_option("--reps", bench_cfg.repetitions, "repetitions per size (>= 20)");
    bench->add_option("--ladder", bench_cfg.ladder, "size multipliers")->delimiter(',');
    bench->add_option("--cache-len", bench_cfg.cache_base_len, "base retained length for cache bytes");
    bench->add_option("--seed", bench_cfg.seed, "random seed");
    auto* o_bench_out = bench->add_option("--out", bench_out, "output path (default stdout)");

    sharpv::HarnessConfig gen_cfg;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Write a synthetic video as a SHRPVID1 tensor file");
    gen->add_option("--pattern", gen_cfg.pattern, "static | uniform_motion | burst | mixed");
    gen->add_option("--rate", gen_cfg.rate, "uniform_motion rotation per frame, in units of pi");
    gen->add_option("--burst-frames", gen_cfg.burst_frames, "0-based burst frame indices")->delimiter(',');
    gen->add_option("--n", gen_cfg.n, "frames");
    gen->add_option("--f", gen_cfg.f, "tokens per frame");
    gen->add_option("--d", gen_cfg.d, "token dimension");
    gen->add_option("--seed", gen_cfg.seed, "seed");
    gen->add_option("--out", gen_out, "output tensor path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return sharpv::kExitConfig;
    }

    try {
        if (*run) {
            sharpv::HarnessConfig cfg;
            if (!rf.config.empty()) {
                sharpv::apply_json(cfg, load_json_file(rf.config));
            }
            if (*o_pattern) cfg.pattern = rf.pattern;
            if (*o_rate) cfg.rate = rf.rate;
            if (*o_burst) cfg.burst_frames = rf.burst_frames;
            if (*o_n) cfg.n = rf.n;
            if (*o_f) cfg.f = rf.f;
            if (*o_d) cfg.d = rf.d;
            if (*o_seed) cfg.seed = rf.seed;
            if (*o_mode) cfg.mode = rf.mode;
            if (*o_w) cfg.w = rf.w;
            if (*o_k) cfg.k = rf.k;
            if (*o_m) cfg.m = rf.m;
            if (*o_steps) cfg.decode_steps = rf.decode_steps;
            if (*o_in) cfg.input = rf.input;
            if (*o_out) cfg.output = rf.output;
            if (*o_layers) cfg.decoder.layers = rf.layers;
            if (*o_model_dim) cfg.decoder.model_dim = rf.model_dim;
            if (*o_heads) cfg.decoder.heads = rf.heads;
            if (*o_no_visual) cfg.visual_pruning = false;

            const sharpv::PipelineOutput output = sharpv::run_harness(cfg);
            emit(sharpv::report_to_json(output, cfg).dump(2), cfg.output);
        } else if (*bench) {
            const sharpv::BenchResult result = sharpv::run_bench(bench_cfg);
            const std::optional<std::string> path = *o_bench_out ? std::optional(bench_out) : std::nullopt;
            emit(sharpv::bench_to_json(result, bench_cfg).dump(2), path);
        } else if (*gen) {
            gen_cfg.validate();
            sharpv::write_tensor_file(gen_out, sharpv::gen_synthetic_video(gen_cfg.video_spec()));
        }
    } catch (const std::exception& e) {
        const int code = sharpv::exit_code_for(e);
        const char* kind = code == sharpv::kExitConfig ? "config error"
                           : code == sharpv::kExitIo   ? "I/O error"
                                                       : "invariant violation";
        std::cerr << kind << ": " << e.what() << '\n';
        return code;
    }
    return sharpv::kExitOk;
}
