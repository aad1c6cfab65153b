// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sharpv/memory_pruner.hpp"
#include "sharpv/toy_decoder.hpp"
#include "sharpv/visual_pruner.hpp"

namespace sharpv {

/// Text embeddings placed around the visual tokens.
struct PromptEmbeddings {
    Mat system;       // system_len x model_dim
    Mat instruction;  // instruction_len x model_dim
};

/// Embeds seeded pseudo-random token ids (drawn from [0, vocab)) for the system and
/// instruction segments.
PromptEmbeddings make_prompt(const Decoder& decoder,
                             std::size_t system_len,
                             std::size_t instruction_len,
                             std::uint64_t seed);

struct SharpVConfig {
    bool visual_pruning = true;  // false keeps every visual token
    PruneConfig prune;
    double m = 0.2;  // degradation threshold; -1 never evicts
    std::size_t decode_steps = 16;

    void validate() const;
};

struct RunReport {
    double vr = 1.0;
    double mr = 1.0;
    double token_budget = 1.0;  // vr * mr
    std::vector<double> per_frame_thresholds;
    std::vector<std::size_t> per_frame_keep_counts;
    std::vector<double> per_layer_sim;
    std::vector<std::size_t> discarded_layers;
    double ttft_seconds = 0.0;  // pipeline start until the first token is chosen
    double tpot_seconds = 0.0;  // mean time of each later token; 0 with one decode step
    std::size_t visual_tokens_before = 0;
    std::size_t visual_tokens_after = 0;
    std::size_t cache_bytes_before = 0;  // after prefill, before eviction
    std::size_t cache_bytes_after = 0;   // after eviction, before decoding
    std::vector<LayerSnapshot> cache_before;
    std::vector<LayerSnapshot> cache_after;
    SharpVConfig config;
    DecoderConfig decoder;
};

struct PipelineOutput {
    std::vector<std::int32_t> tokens;
    RunReport report;
};

/// Visual pruning, prefill, degradation profiling, eviction with position re-encoding,
/// then greedy decoding of config.decode_steps tokens.
PipelineOutput run_pipeline(const Decoder& decoder,
                            const VideoTokens& video,
                            const PromptEmbeddings& prompt,
                            const SharpVConfig& config);

/// The same prompt with no pruning of any kind.
std::vector<std::int32_t> run_baseline(const Decoder& decoder,
                                       const VideoTokens& video,
                                       const PromptEmbeddings& prompt,
                                       std::size_t decode_steps);

/// Assembles system, projected visual, and instruction rows into one embedded prompt.
Mat assemble_prompt(const Decoder& decoder, const PromptEmbeddings& prompt, const Mat& visual_tokens);

/// Throws InvariantError if a report breaks its own accounting (ratios outside (0, 1],
/// token_budget != vr * mr, length mismatches).
void check_report(const RunReport& report);

}  // namespace sharpv
