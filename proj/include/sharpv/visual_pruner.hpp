// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sharpv/core_math.hpp"

namespace sharpv {

/// Visual tokens of a sampled video: n frames of f tokens, each of dimension d.
/// Stored frame-major: rows [t*f, (t+1)*f) of data() belong to frame t.
class VideoTokens {
public:
    VideoTokens(std::size_t frames, std::size_t tokens_per_frame, Mat data);

    std::size_t frames() const { return m_frames; }
    std::size_t tokens_per_frame() const { return m_tokens_per_frame; }
    std::size_t dim() const { return m_data.cols(); }
    std::size_t token_count() const { return m_data.rows(); }
    const Mat& data() const { return m_data; }
    MatView frame(std::size_t t) const { return m_data.view().row_block(t * m_tokens_per_frame, m_tokens_per_frame); }

    bool operator==(const VideoTokens&) const = default;

private:
    std::size_t m_frames;
    std::size_t m_tokens_per_frame;
    Mat m_data;
};

/// Per-token scores laid out frames x tokens_per_frame.
class ScoreGrid {
public:
    ScoreGrid() = default;
    ScoreGrid(std::size_t frames, std::size_t tokens_per_frame);
    ScoreGrid(std::size_t frames, std::size_t tokens_per_frame, std::vector<double> values);

    std::size_t frames() const { return m_frames; }
    std::size_t tokens_per_frame() const { return m_tokens_per_frame; }
    std::span<const double> row(std::size_t t) const {
        return std::span<const double>(m_values).subspan(t * m_tokens_per_frame, m_tokens_per_frame);
    }
    std::span<double> row(std::size_t t) {
        return std::span<double>(m_values).subspan(t * m_tokens_per_frame, m_tokens_per_frame);
    }
    double at(std::size_t t, std::size_t i) const { return m_values[t * m_tokens_per_frame + i]; }
    const std::vector<double>& values() const { return m_values; }

    bool operator==(const ScoreGrid&) const = default;

private:
    std::size_t m_frames = 0;
    std::size_t m_tokens_per_frame = 0;
    std::vector<double> m_values;
};

struct ImportanceMap {
    double w = 1.0;
    ScoreGrid spatial;
    ScoreGrid temporal;
    ScoreGrid combined;  // temporal + w * spatial
};

enum class PruneMode : std::uint8_t {
    adaptive,  // per-frame keep ratio from inter-frame variation, then top-k
    manual,    // keep every token whose combined importance reaches k
};

struct PruneConfig {
    double w = 1.0;
    PruneMode mode = PruneMode::adaptive;
    double k = 1.6;  // only read in manual mode

    /// Throws ConfigError when w < 0 or (manual) k is outside [0, 2(1 + w)].
    void validate() const;
};

struct RetentionPlan {
    PruneMode mode = PruneMode::adaptive;
    double k = 0.0;
    std::vector<double> thresholds;                      // per frame, in [0, 1]
    std::vector<std::size_t> keep_counts;                // per frame, in [1, f]
    std::vector<std::vector<std::size_t>> kept_indices;  // per frame, ascending

    bool operator==(const RetentionPlan&) const = default;
};

struct TokenOrigin {
    std::size_t frame;
    std::size_t index;

    bool operator==(const TokenOrigin&) const = default;
};

struct PrunedVideo {
    Mat tokens;
    std::vector<TokenOrigin> origin;  // frame-major, ascending within a frame
    double vr = 1.0;                  // tokens.rows() / (n * f)
};

struct PruneResult {
    PrunedVideo pruned;
    ImportanceMap importance;
    RetentionPlan plan;
};

/// Dissimilarity of each token to its frame's mean token.
ScoreGrid spatial_importance(const VideoTokens& video);

/// Dissimilarity of each token to the same-index token of the previous frame. The first
/// frame is compared against a virtual frame filled with its own mean token, so its row
/// equals its spatial row.
ScoreGrid temporal_importance(const VideoTokens& video);

ScoreGrid combined_importance(const ScoreGrid& spatial, const ScoreGrid& temporal, double w);

/// Per-frame keep ratio |T_t| / (2 sqrt f); the first frame uses |S_1|. Clamped to [0, 1].
std::vector<double> frame_thresholds(const ScoreGrid& spatial, const ScoreGrid& temporal);

/// clamp(round(threshold * f), 1, f), rounding half away from zero.
std::size_t keep_count_for(double threshold, std::size_t tokens_per_frame);

/// Ascending indices of the keep_count largest scores; equal scores prefer the lower index.
std::vector<std::size_t> select_topk(std::span<const double> scores, std::size_t keep_count);

/// Keeps every token in the video, in order (vr = 1).
PrunedVideo keep_all(const VideoTokens& video);

PruneResult prune_video(const VideoTokens& video, const PruneConfig& config);

struct VideoShape {
    std::size_t frames;
    std::size_t tokens_per_frame;
    std::size_t dim;
};

struct ScalingPoint {
    VideoShape shape;
    double median_seconds;
};

/// Median thread CPU time of prune_video (adaptive, w = 1) per shape over `repetitions`
/// runs on seeded random videos. Repetitions are interleaved across shapes.
std::vector<ScalingPoint> scoring_cost_scaling(std::span<const VideoShape> shapes,
                                               std::size_t repetitions,
                                               std::uint64_t seed);

}  // namespace sharpv
