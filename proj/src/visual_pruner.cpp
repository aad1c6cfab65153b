// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sharpv/visual_pruner.hpp"

#include <algorithm>
#include <ctime>
#include <cmath>
#include <numeric>
#include <string>

#include "sharpv/error.hpp"
#include "sharpv/rng.hpp"

namespace sharpv {

VideoTokens::VideoTokens(std::size_t frames, std::size_t tokens_per_frame, Mat data)
    : m_frames(frames),
      m_tokens_per_frame(tokens_per_frame),
      m_data(std::move(data)) {
    if (frames == 0 || tokens_per_frame == 0 || m_data.cols() == 0) {
        throw ValueError("VideoTokens: n, f and d must all be >= 1");
    }
    if (m_data.rows() != frames * tokens_per_frame) {
        throw ShapeError("VideoTokens: expected " + std::to_string(frames * tokens_per_frame) + " rows, got " +
                         std::to_string(m_data.rows()));
    }
}

ScoreGrid::ScoreGrid(std::size_t frames, std::size_t tokens_per_frame)
    : m_frames(frames),
      m_tokens_per_frame(tokens_per_frame),
      m_values(frames * tokens_per_frame, 0.0) {}

ScoreGrid::ScoreGrid(std::size_t frames, std::size_t tokens_per_frame, std::vector<double> values)
    : m_frames(frames),
      m_tokens_per_frame(tokens_per_frame),
      m_values(std::move(values)) {
    if (m_values.size() != frames * tokens_per_frame) {
        throw ShapeError("ScoreGrid: value count does not match frames x tokens");
    }
}

void PruneConfig::validate() const {
    if (!std::isfinite(w) || w < 0.0) {
        throw ConfigError("w must be a finite value >= 0");
    }
    if (mode == PruneMode::manual) {
        const double k_max = 2.0 * (1.0 + w);
        if (!std::isfinite(k) || k < 0.0 || k > k_max) {
            throw ConfigError("k must lie in [0, " + std::to_string(k_max) + "] for w = " + std::to_string(w));
        }
    }
}

ScoreGrid spatial_importance(const VideoTokens& video) {
    ScoreGrid out(video.frames(), video.tokens_per_frame());
    for (std::size_t t = 0; t < video.frames(); ++t) {
        const MatView frame = video.frame(t);
        const Vec scores = row_dissim(frame, mean_rows(frame));
        std::ranges::copy(scores, out.row(t).begin());
    }
    return out;
}

ScoreGrid temporal_importance(const VideoTokens& video) {
    ScoreGrid out(video.frames(), video.tokens_per_frame());
    for (std::size_t t = 0; t < video.frames(); ++t) {
        const MatView frame = video.frame(t);
        const Vec scores = t == 0 ? row_dissim(frame, mean_rows(frame)) : paired_row_dissim(frame, video.frame(t - 1));
        std::ranges::copy(scores, out.row(t).begin());
    }
    return out;
}

ScoreGrid combined_importance(const ScoreGrid& spatial, const ScoreGrid& temporal, double w) {
    if (spatial.frames() != temporal.frames() || spatial.tokens_per_frame() != temporal.tokens_per_frame()) {
        throw ShapeError("combined_importance: spatial and temporal grids differ in shape");
    }
    std::vector<double> values(temporal.values().size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = temporal.values()[i] + w * spatial.values()[i];
    }
    return ScoreGrid(temporal.frames(), temporal.tokens_per_frame(), std::move(values));
}

std::vector<double> frame_thresholds(const ScoreGrid& spatial, const ScoreGrid& temporal) {
    if (spatial.frames() != temporal.frames() || spatial.tokens_per_frame() != temporal.tokens_per_frame()) {
        throw ShapeError("frame_thresholds: spatial and temporal grids differ in shape");
    }
    const double bound = 2.0 * std::sqrt(static_cast<double>(temporal.tokens_per_frame()));
    std::vector<double> out(temporal.frames());
    for (std::size_t t = 0; t < out.size(); ++t) {
        const auto row = t == 0 ? spatial.row(0) : temporal.row(t);
        out[t] = std::clamp(l2_norm(row) / bound, 0.0, 1.0);
    }
    return out;
}

std::size_t keep_count_for(double threshold, std::size_t tokens_per_frame) {
    const double raw = std::round(threshold * static_cast<double>(tokens_per_frame));
    if (!(raw >= 1.0)) {
        return 1;
    }
    return std::min(tokens_per_frame, static_cast<std::size_t>(raw));
}

std::vector<std::size_t> select_topk(std::span<const double> scores, std::size_t keep_count) {
    if (keep_count < 1 || keep_count > scores.size()) {
        throw ValueError("select_topk: keep_count " + std::to_string(keep_count) + " outside [1, " +
                         std::to_string(scores.size()) + "]");
    }
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto before = [&](std::size_t a, std::size_t b) {
        return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep_count - 1), order.end(),
                     before);
    order.resize(keep_count);
    std::ranges::sort(order);
    return order;
}

namespace {

std::vector<std::size_t> select_at_least(std::span<const double> scores, double k) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] >= k) {
            kept.push_back(i);
        }
    }
    if (kept.empty()) {
        kept.push_back(select_topk(scores, 1).front());
    }
    return kept;
}

PrunedVideo gather(const VideoTokens& video, const std::vector<std::vector<std::size_t>>& kept_indices) {
    PrunedVideo out;
    std::vector<double> values;
    for (std::size_t t = 0; t < kept_indices.size(); ++t) {
        const MatView frame = video.frame(t);
        for (std::size_t i : kept_indices[t]) {
            const auto row = frame.row(i);
            values.insert(values.end(), row.begin(), row.end());
            out.origin.push_back({t, i});
        }
    }
    out.tokens = Mat(out.origin.size(), video.dim(), std::move(values));
    out.vr = static_cast<double>(out.origin.size()) / static_cast<double>(video.token_count());
    return out;
}

}  // namespace

PrunedVideo keep_all(const VideoTokens& video) {
    PrunedVideo out;
    out.tokens = video.data();
    out.origin.reserve(video.token_count());
    for (std::size_t t = 0; t < video.frames(); ++t) {
        for (std::size_t i = 0; i < video.tokens_per_frame(); ++i) {
            out.origin.push_back({t, i});
        }
    }
    out.vr = 1.0;
    return out;
}

PruneResult prune_video(const VideoTokens& video, const PruneConfig& config) {
    config.validate();

    PruneResult result;
    ImportanceMap& importance = result.importance;
    importance.w = config.w;
    importance.spatial = spatial_importance(video);
    importance.temporal = temporal_importance(video);
    importance.combined = combined_importance(importance.spatial, importance.temporal, config.w);

    RetentionPlan& plan = result.plan;
    plan.mode = config.mode;
    plan.k = config.mode == PruneMode::manual ? config.k : 0.0;
    plan.thresholds = frame_thresholds(importance.spatial, importance.temporal);

    const std::size_t f = video.tokens_per_frame();
    for (std::size_t t = 0; t < video.frames(); ++t) {
        const auto scores = importance.combined.row(t);
        std::vector<std::size_t> kept = config.mode == PruneMode::adaptive
                                            ? select_topk(scores, keep_count_for(plan.thresholds[t], f))
                                            : select_at_least(scores, config.k);
        plan.keep_counts.push_back(kept.size());
        plan.kept_indices.push_back(std::move(kept));
    }

    result.pruned = gather(video, plan.kept_indices);
    return result;
}

namespace {

// CPU time of the calling thread; unlike wall time it excludes preemption by other load.
double thread_cpu_seconds() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

}  // namespace

std::vector<ScalingPoint> scoring_cost_scaling(std::span<const VideoShape> shapes,
                                               std::size_t repetitions,
                                               std::uint64_t seed) {
    if (repetitions == 0) {
        throw ConfigError("scoring_cost_scaling: repetitions must be >= 1");
    }
    const PruneConfig config{};
    std::vector<VideoTokens> videos;
    videos.reserve(shapes.size());
    for (const VideoShape& shape : shapes) {
        GaussianRng rng(seed);
        std::vector<double> values(shape.frames * shape.tokens_per_frame * shape.dim);
        for (double& x : values) {
            x = rng.normal();
        }
        videos.emplace_back(shape.frames, shape.tokens_per_frame,
                            Mat(shape.frames * shape.tokens_per_frame, shape.dim, std::move(values)));
    }

    // One untimed warm-up pass per shape, then round-robin so every shape sees the same
    // stretch of machine load.
    volatile std::size_t sink = 0;
    for (const VideoTokens& video : videos) {
        sink = sink + prune_video(video, config).pruned.origin.size();
    }
    std::vector<std::vector<double>> times(videos.size());
    for (std::size_t r = 0; r < repetitions; ++r) {
        for (std::size_t s = 0; s < videos.size(); ++s) {
            const double start = thread_cpu_seconds();
            sink = sink + prune_video(videos[s], config).pruned.origin.size();
            times[s].push_back(thread_cpu_seconds() - start);
        }
    }

    std::vector<ScalingPoint> out;
    for (std::size_t s = 0; s < videos.size(); ++s) {
        auto& t = times[s];
        std::ranges::sort(t);
        const std::size_t mid = t.size() / 2;
        const double median = t.size() % 2 == 1 ? t[mid] : 0.5 * (t[mid - 1] + t[mid]);
        out.push_back({shapes[s], median});
    }
    return out;
}

}  // namespace sharpv
