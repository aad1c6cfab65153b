// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sharpv/core_math.hpp"

namespace sharpv {

enum class Segment : std::uint8_t { system, visual, instruction, generated };

inline constexpr std::size_t kSegmentCount = 4;
std::string_view to_string(Segment s);

/// Half-open range [begin, end) of sequence positions.
struct PositionRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool contains(std::size_t pos) const { return pos >= begin && pos < end; }
    bool operator==(const PositionRange&) const = default;
};

/// Prompt layout: system tokens, then visual tokens, then instruction tokens.
class SegmentedSequence {
public:
    static SegmentedSequence from_lengths(std::size_t system_len, std::size_t visual_len, std::size_t instruction_len);

    PositionRange system() const { return m_system; }
    PositionRange visual() const { return m_visual; }
    PositionRange instruction() const { return m_instruction; }
    std::size_t total_len() const { return m_instruction.end; }

    /// Segment owning prompt position pos (pos < total_len()).
    Segment segment_at(std::size_t pos) const;

    bool operator==(const SegmentedSequence&) const = default;

private:
    PositionRange m_system;
    PositionRange m_visual;
    PositionRange m_instruction;
};

/// One decoder layer's key/value store. Each entry holds heads * head_dim keys and as
/// many values, its position id and its segment tag. Position ids strictly increase.
class KVCacheLayer {
public:
    KVCacheLayer(std::size_t heads, std::size_t head_dim);

    void append(std::span<const double> key, std::span<const double> value, std::int64_t position_id, Segment tag);

    std::size_t size() const { return m_position_ids.size(); }
    std::size_t heads() const { return m_heads; }
    std::size_t head_dim() const { return m_head_dim; }
    std::size_t entry_width() const { return m_heads * m_head_dim; }

    std::span<const double> key(std::size_t i) const;
    std::span<const double> value(std::size_t i) const;
    const std::vector<double>& keys() const { return m_keys; }
    const std::vector<double>& values() const { return m_values; }
    const std::vector<std::int64_t>& position_ids() const { return m_position_ids; }
    const std::vector<Segment>& segment_tags() const { return m_tags; }

    /// Next position id a newly appended entry receives.
    std::int64_t next_position_id() const { return m_position_ids.empty() ? 0 : m_position_ids.back() + 1; }

    /// Bytes held by keys and values: size() * 2 * heads * head_dim * sizeof(double).
    std::size_t byte_footprint() const;

    std::size_t count(Segment tag) const;

    /// Copy without the entries whose tag equals `tag`.
    KVCacheLayer without(Segment tag) const;

    /// Copy with position ids replaced by `ids` (same length, strictly increasing).
    KVCacheLayer with_position_ids(std::vector<std::int64_t> ids) const;

    bool operator==(const KVCacheLayer&) const = default;

private:
    std::size_t m_heads;
    std::size_t m_head_dim;
    std::vector<double> m_keys;
    std::vector<double> m_values;
    std::vector<std::int64_t> m_position_ids;
    std::vector<Segment> m_tags;
};

class LayeredKVCache {
public:
    LayeredKVCache() = default;
    LayeredKVCache(std::size_t layers, std::size_t heads, std::size_t head_dim);
    explicit LayeredKVCache(std::vector<KVCacheLayer> layers);

    std::size_t layer_count() const { return m_layers.size(); }
    const KVCacheLayer& layer(std::size_t l) const { return m_layers.at(l); }
    KVCacheLayer& layer(std::size_t l) { return m_layers.at(l); }
    const std::vector<KVCacheLayer>& layers() const { return m_layers; }

    std::size_t total_entries() const;
    std::size_t byte_footprint() const;

    bool operator==(const LayeredKVCache&) const = default;

private:
    std::vector<KVCacheLayer> m_layers;
};

struct LayerSnapshot {
    std::array<std::size_t, kSegmentCount> entries{};  // indexed by Segment
    std::size_t total = 0;
    std::size_t bytes = 0;
};

/// Per-layer, per-segment entry counts and byte footprints.
std::vector<LayerSnapshot> snapshot(const LayeredKVCache& cache);

/// Mean cosine similarity, per layer, between visual hidden states and the original visual features.
struct DegradationProfile {
    std::vector<double> per_layer_sim;
};

struct DiscardPlan {
    std::vector<bool> per_layer;  // true: evict this layer's visual entries
    double m = 0.2;

    std::size_t discarded_count() const;
};

/// Builds the profile from the per-layer hidden states (one total_len x d matrix per layer)
/// against the original embedded sequence. Averages per-token cosine over the visual span.
DegradationProfile degradation_profile(std::span<const Mat> hidden_trace,
                                       const Mat& original,
                                       const SegmentedSequence& spans);

/// per_layer[l] = profile[l] < m. m is clamped into [-1, 1]; NaN is rejected.
DiscardPlan discard_decision(const DegradationProfile& profile, double m);

/// Removes visual-tagged entries from every layer the plan marks; other layers are copied unchanged.
LayeredKVCache apply_discard(const LayeredKVCache& cache, const DiscardPlan& plan, const SegmentedSequence& spans);

/// Rewrites position ids to 0..size-1, keeping order. Keys and values are untouched.
KVCacheLayer reencode_positions(const KVCacheLayer& layer);
LayeredKVCache reencode_positions(const LayeredKVCache& cache);

/// Entries retained in `after` over entries in `before`, summed over all layers.
double mr_metric(const LayeredKVCache& before, const LayeredKVCache& after);

}  // namespace sharpv
