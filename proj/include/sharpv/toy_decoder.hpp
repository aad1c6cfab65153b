// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sharpv/core_math.hpp"
#include "sharpv/memory_pruner.hpp"

namespace sharpv {

struct DecoderConfig {
    std::size_t layers = 8;
    std::size_t model_dim = 64;
    std::size_t heads = 4;
    std::size_t mlp_dim = 256;
    std::size_t vocab = 256;
    std::size_t max_positions = 8192;
    std::uint64_t seed = 42;
    /// Width of incoming visual tokens; 0 means model_dim (no projection).
    std::size_t visual_dim = 0;
    /// Multiplier on each attention / MLP branch before it is added to the residual stream.
    double residual_scale = 0.35;

    std::size_t head_dim() const { return model_dim / heads; }
    std::size_t effective_visual_dim() const { return visual_dim == 0 ? model_dim : visual_dim; }

    /// Throws ConfigError on zero counts, model_dim % heads != 0, or a non-positive residual_scale.
    void validate() const;

    bool operator==(const DecoderConfig&) const = default;
};

/// Input of every decoder layer during prefill: layer_inputs[l] is total_len x model_dim,
/// and layer_inputs[0] is the embedded prompt itself.
struct HiddenTrace {
    std::vector<Mat> layer_inputs;
};

struct PrefillResult {
    HiddenTrace trace;
    LayeredKVCache cache;
    Mat final_hidden;            // output of the last layer, total_len x model_dim
    std::vector<double> logits;  // next-token logits at the last prompt position
};

struct StepResult {
    std::vector<double> logits;
    std::vector<double> hidden;  // output of the last layer for the new token
};

/// Small pre-norm transformer decoder with deterministic random weights.
///
/// Blocks: h += s * Attn(rms(h)); h += s * W2 gelu(W1 rms(h)); logits = rms(h) W_out,
/// with s = residual_scale and rms an RMS norm without gain. Attention is causal multi-head
/// with an additive distance bias -slope_h * (pos_q - pos_k), slope_h = 2^(-8(h+1)/heads),
/// evaluated on cache position ids. Because positions only enter through distances of
/// stored ids, compacting the ids of a pruned cache is all the re-encoding it needs.
///
/// Weights are drawn in a fixed order from GaussianRng(seed), each scaled by 1/sqrt(fan_in):
/// token embeddings (vocab x d), the visual projection (only when visual_dim != model_dim),
/// then per layer Wq, Wk, Wv, Wo (d x d), W1 (d x mlp), W2 (mlp x d), then W_out (d x vocab).
/// Token embeddings use fan_in = d so each embedding has norm close to 1.
class Decoder {
public:
    explicit Decoder(DecoderConfig config);

    const DecoderConfig& config() const { return m_config; }

    /// Position-weighted sum of every weight, in draw order: sum_k w_k * (1 + k mod 7).
    double weight_checksum() const;

    std::span<const double> token_embedding(std::int32_t token) const;
    Mat embed_tokens(std::span<const std::int32_t> tokens) const;

    /// Maps visual tokens (rows x visual_dim) into the model width. Identity copy when
    /// visual_dim == model_dim.
    Mat project_visual(const Mat& visual) const;

    /// Full causal forward over the embedded prompt. Cache entries get position ids
    /// 0..total_len-1 and segment tags from spans.
    PrefillResult prefill(const Mat& embedded, const SegmentedSequence& spans) const;

    /// Appends one entry per layer (tagged `tag`) and returns next-token logits.
    StepResult decode_step(LayeredKVCache& cache,
                           std::span<const double> embedding,
                           Segment tag = Segment::generated) const;

    /// Reference path for eviction: visual entries of every layer with hide_visual[l] != 0
    /// stay in the cache but are skipped, and the remaining entries are placed at their
    /// rank among the visible ones.
    StepResult decode_step_masked(LayeredKVCache& cache,
                                  std::span<const double> embedding,
                                  std::span<const std::uint8_t> hide_visual,
                                  Segment tag = Segment::generated) const;

    /// Index of the largest logit; lowest index on ties.
    static std::int32_t argmax(std::span<const double> logits);

private:
    struct LayerWeights {
        std::vector<double> wq, wk, wv, wo, w1, w2;
    };

    StepResult step(LayeredKVCache& cache,
                    std::span<const double> embedding,
                    std::span<const std::uint8_t> hide_visual,
                    Segment tag) const;

    std::vector<double> logits_for(std::span<const double> hidden) const;

    DecoderConfig m_config;
    std::vector<double> m_token_embedding;
    std::vector<double> m_visual_projection;
    std::vector<LayerWeights> m_layers;
    std::vector<double> m_unembedding;
    std::vector<double> m_slopes;
};

/// Prefill followed by greedy decoding with no pruning at all. Returns `steps` tokens.
std::vector<std::int32_t> greedy_generate(const Decoder& decoder,
                                          const Mat& embedded,
                                          const SegmentedSequence& spans,
                                          std::size_t steps);

}  // namespace sharpv
