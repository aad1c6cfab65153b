// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sharpv/memory_pruner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sharpv/error.hpp"

namespace sharpv {

std::string_view to_string(Segment s) {
    switch (s) {
        case Segment::system:
            return "system";
        case Segment::visual:
            return "visual";
        case Segment::instruction:
            return "instruction";
        case Segment::generated:
            return "generated";
    }
    return "unknown";
}

SegmentedSequence SegmentedSequence::from_lengths(std::size_t system_len,
                                                  std::size_t visual_len,
                                                  std::size_t instruction_len) {
    SegmentedSequence s;
    s.m_system = {0, system_len};
    s.m_visual = {system_len, system_len + visual_len};
    s.m_instruction = {system_len + visual_len, system_len + visual_len + instruction_len};
    return s;
}

Segment SegmentedSequence::segment_at(std::size_t pos) const {
    if (m_system.contains(pos)) {
        return Segment::system;
    }
    if (m_visual.contains(pos)) {
        return Segment::visual;
    }
    if (m_instruction.contains(pos)) {
        return Segment::instruction;
    }
    throw ShapeError("segment_at: position " + std::to_string(pos) + " is past the prompt");
}

KVCacheLayer::KVCacheLayer(std::size_t heads, std::size_t head_dim) : m_heads(heads), m_head_dim(head_dim) {
    if (heads == 0 || head_dim == 0) {
        throw ValueError("KVCacheLayer: heads and head_dim must be >= 1");
    }
}

void KVCacheLayer::append(std::span<const double> key,
                          std::span<const double> value,
                          std::int64_t position_id,
                          Segment tag) {
    if (key.size() != entry_width() || value.size() != entry_width()) {
        throw ShapeError("KVCacheLayer::append: key/value width must be heads * head_dim");
    }
    if (!m_position_ids.empty() && position_id <= m_position_ids.back()) {
        throw InvariantError("KVCacheLayer::append: position ids must strictly increase");
    }
    m_keys.insert(m_keys.end(), key.begin(), key.end());
    m_values.insert(m_values.end(), value.begin(), value.end());
    m_position_ids.push_back(position_id);
    m_tags.push_back(tag);
}

std::span<const double> KVCacheLayer::key(std::size_t i) const {
    return std::span<const double>(m_keys).subspan(i * entry_width(), entry_width());
}

std::span<const double> KVCacheLayer::value(std::size_t i) const {
    return std::span<const double>(m_values).subspan(i * entry_width(), entry_width());
}

std::size_t KVCacheLayer::byte_footprint() const {
    return size() * 2 * entry_width() * sizeof(double);
}

std::size_t KVCacheLayer::count(Segment tag) const {
    return static_cast<std::size_t>(std::ranges::count(m_tags, tag));
}

KVCacheLayer KVCacheLayer::without(Segment tag) const {
    KVCacheLayer out(m_heads, m_head_dim);
    for (std::size_t i = 0; i < size(); ++i) {
        if (m_tags[i] != tag) {
            out.append(key(i), value(i), m_position_ids[i], m_tags[i]);
        }
    }
    return out;
}

KVCacheLayer KVCacheLayer::with_position_ids(std::vector<std::int64_t> ids) const {
    if (ids.size() != size()) {
        throw ShapeError("with_position_ids: id count does not match entry count");
    }
    if (std::ranges::adjacent_find(ids, std::greater_equal<>{}) != ids.end()) {
        throw InvariantError("with_position_ids: ids must strictly increase");
    }
    KVCacheLayer out = *this;
    out.m_position_ids = std::move(ids);
    return out;
}

LayeredKVCache::LayeredKVCache(std::size_t layers, std::size_t heads, std::size_t head_dim)
    : m_layers(layers, KVCacheLayer(heads, head_dim)) {}

LayeredKVCache::LayeredKVCache(std::vector<KVCacheLayer> layers) : m_layers(std::move(layers)) {}

std::size_t LayeredKVCache::total_entries() const {
    std::size_t n = 0;
    for (const auto& layer : m_layers) {
        n += layer.size();
    }
    return n;
}

std::size_t LayeredKVCache::byte_footprint() const {
    std::size_t n = 0;
    for (const auto& layer : m_layers) {
        n += layer.byte_footprint();
    }
    return n;
}

std::vector<LayerSnapshot> snapshot(const LayeredKVCache& cache) {
    std::vector<LayerSnapshot> out;
    out.reserve(cache.layer_count());
    for (const auto& layer : cache.layers()) {
        LayerSnapshot s;
        for (Segment tag : layer.segment_tags()) {
            ++s.entries[static_cast<std::size_t>(tag)];
        }
        s.total = layer.size();
        s.bytes = layer.byte_footprint();
        out.push_back(s);
    }
    return out;
}

std::size_t DiscardPlan::discarded_count() const {
    return static_cast<std::size_t>(std::ranges::count(per_layer, true));
}

DegradationProfile degradation_profile(std::span<const Mat> hidden_trace,
                                       const Mat& original,
                                       const SegmentedSequence& spans) {
    const PositionRange visual = spans.visual();
    if (visual.size() == 0) {
        throw ShapeError("degradation_profile: visual span is empty");
    }
    if (original.rows() != spans.total_len()) {
        throw ShapeError("degradation_profile: original has " + std::to_string(original.rows()) +
                         " rows, spans cover " + std::to_string(spans.total_len()));
    }
    DegradationProfile profile;
    profile.per_layer_sim.reserve(hidden_trace.size());
    for (std::size_t l = 0; l < hidden_trace.size(); ++l) {
        const Mat& hidden = hidden_trace[l];
        if (hidden.rows() != original.rows() || hidden.cols() != original.cols()) {
            throw ShapeError("degradation_profile: layer " + std::to_string(l) + " shape differs from original");
        }
        long double sum = 0;
        for (std::size_t i = visual.begin; i < visual.end; ++i) {
            sum += cosine_sim(hidden.row(i), original.row(i));
        }
        profile.per_layer_sim.push_back(static_cast<double>(sum / static_cast<long double>(visual.size())));
    }
    return profile;
}

DiscardPlan discard_decision(const DegradationProfile& profile, double m) {
    if (std::isnan(m)) {
        throw ConfigError("discard_decision: M is NaN");
    }
    DiscardPlan plan;
    plan.m = std::clamp(m, -1.0, 1.0);
    plan.per_layer.reserve(profile.per_layer_sim.size());
    for (double sim : profile.per_layer_sim) {
        plan.per_layer.push_back(sim < plan.m);
    }
    return plan;
}

LayeredKVCache apply_discard(const LayeredKVCache& cache, const DiscardPlan& plan, const SegmentedSequence& spans) {
    if (plan.per_layer.size() != cache.layer_count()) {
        throw ShapeError("apply_discard: plan covers " + std::to_string(plan.per_layer.size()) + " layers, cache has " +
                         std::to_string(cache.layer_count()));
    }
    std::vector<KVCacheLayer> layers;
    layers.reserve(cache.layer_count());
    for (std::size_t l = 0; l < cache.layer_count(); ++l) {
        const KVCacheLayer& layer = cache.layer(l);
        const std::size_t visual = layer.count(Segment::visual);
        if (visual != 0 && visual != spans.visual().size()) {
            throw ShapeError("apply_discard: layer " + std::to_string(l) + " holds " + std::to_string(visual) +
                             " visual entries, prompt layout has " + std::to_string(spans.visual().size()));
        }
        layers.push_back(plan.per_layer[l] ? layer.without(Segment::visual) : layer);
    }
    return LayeredKVCache(std::move(layers));
}

KVCacheLayer reencode_positions(const KVCacheLayer& layer) {
    std::vector<std::int64_t> ids(layer.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ids[i] = static_cast<std::int64_t>(i);
    }
    return layer.with_position_ids(std::move(ids));
}

LayeredKVCache reencode_positions(const LayeredKVCache& cache) {
    std::vector<KVCacheLayer> layers;
    layers.reserve(cache.layer_count());
    for (const auto& layer : cache.layers()) {
        layers.push_back(reencode_positions(layer));
    }
    return LayeredKVCache(std::move(layers));
}

double mr_metric(const LayeredKVCache& before, const LayeredKVCache& after) {
    if (before.layer_count() != after.layer_count()) {
        throw ShapeError("mr_metric: layer counts differ");
    }
    const std::size_t total = before.total_entries();
    if (total == 0) {
        throw ShapeError("mr_metric: reference cache is empty");
    }
    return static_cast<double>(after.total_entries()) / static_cast<double>(total);
}

}  // namespace sharpv
