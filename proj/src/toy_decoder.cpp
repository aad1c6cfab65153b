// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sharpv/toy_decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sharpv/error.hpp"
#include "sharpv/rng.hpp"

namespace sharpv {

namespace {

constexpr double kRmsEpsilon = 1e-6;

std::vector<double> random_matrix(GaussianRng& rng, std::size_t rows, std::size_t cols, std::size_t fan_in) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::vector<double> w(rows * cols);
    for (double& x : w) {
        x = rng.normal() * scale;
    }
    return w;
}

// y = x W for W stored row-major (x.size() x out).
std::vector<double> matvec(std::span<const double> x, const std::vector<double>& w, std::size_t out) {
    std::vector<double> y(out, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        const double* row = w.data() + i * out;
        for (std::size_t j = 0; j < out; ++j) {
            y[j] += xi * row[j];
        }
    }
    return y;
}

std::vector<double> rms_norm(std::span<const double> x) {
    double ss = 0.0;
    for (double v : x) {
        ss += v * v;
    }
    const double inv = 1.0 / std::sqrt(ss / static_cast<double>(x.size()) + kRmsEpsilon);
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] * inv;
    }
    return out;
}

double gelu(double x) {
    constexpr double c = 0.7978845608028654;  // sqrt(2 / pi)
    return 0.5 * x * (1.0 + std::tanh(c * (x + 0.044715 * x * x * x)));
}

struct VisibleEntry {
    std::size_t index;
    std::int64_t position;
};

// Multi-head attention of one query over the listed cache entries.
std::vector<double> attend(std::span<const double> q,
                           const KVCacheLayer& layer,
                           std::span<const VisibleEntry> entries,
                           std::int64_t query_position,
                           std::span<const double> slopes) {
    const std::size_t heads = layer.heads();
    const std::size_t hd = layer.head_dim();
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(hd));
    std::vector<double> out(heads * hd, 0.0);
    std::vector<double> scores(entries.size());
    for (std::size_t h = 0; h < heads; ++h) {
        const auto qh = q.subspan(h * hd, hd);
        double max_score = -INFINITY;
        for (std::size_t e = 0; e < entries.size(); ++e) {
            const auto kh = layer.key(entries[e].index).subspan(h * hd, hd);
            double s = 0.0;
            for (std::size_t i = 0; i < hd; ++i) {
                s += qh[i] * kh[i];
            }
            const auto distance = static_cast<double>(query_position - entries[e].position);
            scores[e] = s * inv_sqrt - slopes[h] * distance;
            max_score = std::max(max_score, scores[e]);
        }
        double denom = 0.0;
        for (double& s : scores) {
            s = std::exp(s - max_score);
            denom += s;
        }
        auto oh = std::span<double>(out).subspan(h * hd, hd);
        for (std::size_t e = 0; e < entries.size(); ++e) {
            const double p = scores[e] / denom;
            const auto vh = layer.value(entries[e].index).subspan(h * hd, hd);
            for (std::size_t i = 0; i < hd; ++i) {
                oh[i] += p * vh[i];
            }
        }
    }
    return out;
}

}  // namespace

void DecoderConfig::validate() const {
    if (layers == 0 || model_dim == 0 || heads == 0 || mlp_dim == 0 || vocab == 0 || max_positions == 0) {
        throw ConfigError("DecoderConfig: all counts must be >= 1");
    }
    if (model_dim % heads != 0) {
        throw ConfigError("DecoderConfig: model_dim " + std::to_string(model_dim) + " is not divisible by heads " +
                          std::to_string(heads));
    }
    if (!(residual_scale > 0.0) || !std::isfinite(residual_scale)) {
        throw ConfigError("DecoderConfig: residual_scale must be finite and > 0");
    }
}

Decoder::Decoder(DecoderConfig config) : m_config(config) {
    m_config.validate();
    const std::size_t d = m_config.model_dim;
    GaussianRng rng(m_config.seed);

    m_token_embedding = random_matrix(rng, m_config.vocab, d, d);
    const std::size_t vd = m_config.effective_visual_dim();
    if (vd != d) {
        m_visual_projection = random_matrix(rng, vd, d, vd);
    }
    m_layers.reserve(m_config.layers);
    for (std::size_t l = 0; l < m_config.layers; ++l) {
        LayerWeights w;
        w.wq = random_matrix(rng, d, d, d);
        w.wk = random_matrix(rng, d, d, d);
        w.wv = random_matrix(rng, d, d, d);
        w.wo = random_matrix(rng, d, d, d);
        w.w1 = random_matrix(rng, d, m_config.mlp_dim, d);
        w.w2 = random_matrix(rng, m_config.mlp_dim, d, m_config.mlp_dim);
        m_layers.push_back(std::move(w));
    }
    m_unembedding = random_matrix(rng, d, m_config.vocab, d);

    for (std::size_t h = 0; h < m_config.heads; ++h) {
        m_slopes.push_back(std::exp2(-8.0 * static_cast<double>(h + 1) / static_cast<double>(m_config.heads)));
    }
}

double Decoder::weight_checksum() const {
    long double sum = 0;
    std::size_t k = 0;
    const auto add = [&](const std::vector<double>& w) {
        for (double x : w) {
            sum += static_cast<long double>(x) * static_cast<long double>(1 + k % 7);
            ++k;
        }
    };
    add(m_token_embedding);
    add(m_visual_projection);
    for (const auto& layer : m_layers) {
        add(layer.wq);
        add(layer.wk);
        add(layer.wv);
        add(layer.wo);
        add(layer.w1);
        add(layer.w2);
    }
    add(m_unembedding);
    return static_cast<double>(sum);
}

std::span<const double> Decoder::token_embedding(std::int32_t token) const {
    if (token < 0 || static_cast<std::size_t>(token) >= m_config.vocab) {
        throw ValueError("token id " + std::to_string(token) + " outside vocabulary");
    }
    const std::size_t d = m_config.model_dim;
    return std::span<const double>(m_token_embedding).subspan(static_cast<std::size_t>(token) * d, d);
}

Mat Decoder::embed_tokens(std::span<const std::int32_t> tokens) const {
    std::vector<double> values;
    values.reserve(tokens.size() * m_config.model_dim);
    for (std::int32_t t : tokens) {
        const auto e = token_embedding(t);
        values.insert(values.end(), e.begin(), e.end());
    }
    return Mat(tokens.size(), m_config.model_dim, std::move(values));
}

Mat Decoder::project_visual(const Mat& visual) const {
    if (visual.cols() != m_config.effective_visual_dim()) {
        throw ShapeError("project_visual: expected width " + std::to_string(m_config.effective_visual_dim()) +
                         ", got " + std::to_string(visual.cols()));
    }
    if (m_visual_projection.empty()) {
        return visual;
    }
    std::vector<double> values;
    values.reserve(visual.rows() * m_config.model_dim);
    for (std::size_t i = 0; i < visual.rows(); ++i) {
        const auto y = matvec(visual.row(i), m_visual_projection, m_config.model_dim);
        values.insert(values.end(), y.begin(), y.end());
    }
    return Mat(visual.rows(), m_config.model_dim, std::move(values));
}

std::vector<double> Decoder::logits_for(std::span<const double> hidden) const {
    return matvec(rms_norm(hidden), m_unembedding, m_config.vocab);
}

PrefillResult Decoder::prefill(const Mat& embedded, const SegmentedSequence& spans) const {
    const std::size_t d = m_config.model_dim;
    const std::size_t len = embedded.rows();
    if (embedded.cols() != d) {
        throw ShapeError("prefill: embedded width " + std::to_string(embedded.cols()) + " != model_dim " +
                         std::to_string(d));
    }
    if (len == 0 || len != spans.total_len()) {
        throw ShapeError("prefill: sequence length must be >= 1 and match the segment layout");
    }
    if (len > m_config.max_positions) {
        throw ValueError("prefill: sequence length " + std::to_string(len) + " exceeds max_positions " +
                         std::to_string(m_config.max_positions));
    }

    PrefillResult result;
    result.cache = LayeredKVCache(m_config.layers, m_config.heads, m_config.head_dim());
    std::vector<double> hidden = embedded.values();
    const double s = m_config.residual_scale;

    for (std::size_t l = 0; l < m_config.layers; ++l) {
        result.trace.layer_inputs.emplace_back(len, d, hidden);
        const LayerWeights& w = m_layers[l];
        KVCacheLayer& layer = result.cache.layer(l);

        std::vector<std::vector<double>> queries(len);
        for (std::size_t t = 0; t < len; ++t) {
            const auto x = rms_norm(std::span<const double>(hidden).subspan(t * d, d));
            queries[t] = matvec(x, w.wq, d);
            layer.append(matvec(x, w.wk, d), matvec(x, w.wv, d), static_cast<std::int64_t>(t), spans.segment_at(t));
        }

        std::vector<VisibleEntry> entries;
        entries.reserve(len);
        for (std::size_t t = 0; t < len; ++t) {
            entries.push_back({t, layer.position_ids()[t]});
            const auto attn = attend(queries[t], layer, entries, layer.position_ids()[t], m_slopes);
            const auto proj = matvec(attn, w.wo, d);
            auto h = std::span<double>(hidden).subspan(t * d, d);
            for (std::size_t i = 0; i < d; ++i) {
                h[i] += s * proj[i];
            }
            const auto up = matvec(rms_norm(h), w.w1, m_config.mlp_dim);
            std::vector<double> act(up.size());
            std::ranges::transform(up, act.begin(), gelu);
            const auto down = matvec(act, w.w2, d);
            for (std::size_t i = 0; i < d; ++i) {
                h[i] += s * down[i];
            }
        }
    }

    result.final_hidden = Mat(len, d, hidden);
    result.logits = logits_for(result.final_hidden.row(len - 1));
    return result;
}

StepResult Decoder::decode_step(LayeredKVCache& cache, std::span<const double> embedding, Segment tag) const {
    return step(cache, embedding, {}, tag);
}

StepResult Decoder::decode_step_masked(LayeredKVCache& cache,
                                       std::span<const double> embedding,
                                       std::span<const std::uint8_t> hide_visual,
                                       Segment tag) const {
    if (hide_visual.size() != m_config.layers) {
        throw ShapeError("decode_step_masked: need one flag per layer");
    }
    return step(cache, embedding, hide_visual, tag);
}

StepResult Decoder::step(LayeredKVCache& cache,
                         std::span<const double> embedding,
                         std::span<const std::uint8_t> hide_visual,
                         Segment tag) const {
    const std::size_t d = m_config.model_dim;
    if (embedding.size() != d) {
        throw ShapeError("decode_step: embedding width must equal model_dim");
    }
    if (cache.layer_count() != m_config.layers) {
        throw ShapeError("decode_step: cache layer count does not match decoder");
    }
    for (const auto& layer : cache.layers()) {
        if (layer.next_position_id() >= static_cast<std::int64_t>(m_config.max_positions)) {
            throw ValueError("decode_step: position overflow (max_positions " +
                             std::to_string(m_config.max_positions) + ")");
        }
    }

    const double s = m_config.residual_scale;
    std::vector<double> h(embedding.begin(), embedding.end());
    std::vector<VisibleEntry> entries;
    for (std::size_t l = 0; l < m_config.layers; ++l) {
        const LayerWeights& w = m_layers[l];
        KVCacheLayer& layer = cache.layer(l);
        const auto x = rms_norm(h);
        const auto q = matvec(x, w.wq, d);
        layer.append(matvec(x, w.wk, d), matvec(x, w.wv, d), layer.next_position_id(), tag);

        const bool masked = !hide_visual.empty() && hide_visual[l] != 0;
        entries.clear();
        for (std::size_t e = 0; e < layer.size(); ++e) {
            if (masked && layer.segment_tags()[e] == Segment::visual) {
                continue;
            }
            const std::int64_t pos = hide_visual.empty() ? layer.position_ids()[e]
                                                         : static_cast<std::int64_t>(entries.size());
            entries.push_back({e, pos});
        }
        const auto attn = attend(q, layer, entries, entries.back().position, m_slopes);
        const auto proj = matvec(attn, w.wo, d);
        for (std::size_t i = 0; i < d; ++i) {
            h[i] += s * proj[i];
        }
        const auto up = matvec(rms_norm(h), w.w1, m_config.mlp_dim);
        std::vector<double> act(up.size());
        std::ranges::transform(up, act.begin(), gelu);
        const auto down = matvec(act, w.w2, d);
        for (std::size_t i = 0; i < d; ++i) {
            h[i] += s * down[i];
        }
    }

    StepResult result;
    result.logits = logits_for(h);
    result.hidden = std::move(h);
    return result;
}

std::int32_t Decoder::argmax(std::span<const double> logits) {
    if (logits.empty()) {
        throw ValueError("argmax: empty logits");
    }
    // max_element returns the first maximal element.
    return static_cast<std::int32_t>(std::ranges::max_element(logits) - logits.begin());
}

std::vector<std::int32_t> greedy_generate(const Decoder& decoder,
                                          const Mat& embedded,
                                          const SegmentedSequence& spans,
                                          std::size_t steps) {
    std::vector<std::int32_t> tokens;
    if (steps == 0) {
        return tokens;
    }
    PrefillResult prefill = decoder.prefill(embedded, spans);
    tokens.push_back(Decoder::argmax(prefill.logits));
    while (tokens.size() < steps) {
        const StepResult step = decoder.decode_step(prefill.cache, decoder.token_embedding(tokens.back()));
        tokens.push_back(Decoder::argmax(step.logits));
    }
    return tokens;
}

}  // namespace sharpv
