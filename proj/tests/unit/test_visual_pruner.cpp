// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracle/reference.hpp"
#include "sharpv/error.hpp"
#include "sharpv/visual_pruner.hpp"

namespace sharpv {
namespace {

VideoTokens make_video(std::size_t n, std::size_t f, std::size_t d, std::vector<double> values) {
    return VideoTokens(n, f, Mat(n * f, d, std::move(values)));
}

VideoTokens random_video(std::mt19937_64& rng, std::size_t n, std::size_t f, std::size_t d) {
    return make_video(n, f, d, oracle::random_video(rng, n, f, d));
}

// Unit tokens; frame t is (-1)^t times frame 0.
VideoTokens antipodal_video(std::size_t n, std::size_t f) {
    std::vector<double> values;
    for (std::size_t t = 0; t < n; ++t) {
        const double sign = t % 2 == 0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < f; ++i) {
            const double angle = 0.7 * static_cast<double>(i);
            values.push_back(sign * std::cos(angle));
            values.push_back(sign * std::sin(angle));
        }
    }
    return make_video(n, f, 2, values);
}

TEST(VisualPrunerTest, VideoTokensValidatesShape) {
    EXPECT_THROW(VideoTokens(2, 3, Mat(5, 4)), ShapeError);
    EXPECT_THROW(VideoTokens(0, 3, Mat(0, 4)), ValueError);
}

TEST(VisualPrunerTest, SpatialImportanceIdenticalTokensIsZero) {
    const auto video = make_video(1, 3, 2, {0.5, 1.0, 0.5, 1.0, 0.5, 1.0});
    const ScoreGrid s = spatial_importance(video);
    for (double x : s.row(0)) {
        EXPECT_DOUBLE_EQ(x, 0.0);
    }
}

TEST(VisualPrunerTest, SpatialImportanceTwoOrthogonalTokens) {
    const auto video = make_video(1, 2, 2, {1.0, 0.0, 0.0, 1.0});
    const ScoreGrid s = spatial_importance(video);
    // Angle to the mean (0.5, 0.5) is 45 degrees: sqrt(2 - 2 cos 45) = sqrt(2 - sqrt 2).
    const double expected = std::sqrt(2.0 - std::sqrt(2.0));
    EXPECT_NEAR(s.at(0, 0), expected, 1e-12);
    EXPECT_NEAR(s.at(0, 1), expected, 1e-12);
    EXPECT_NEAR(expected, 0.76537, 1e-5);
}

TEST(VisualPrunerTest, TemporalImportanceDuplicateFramesIsZero) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    std::vector<double> frame(4 * 5);
    for (double& x : frame) {
        x = normal(rng);
    }
    std::vector<double> values;
    for (int t = 0; t < 3; ++t) {
        values.insert(values.end(), frame.begin(), frame.end());
    }
    const auto video = make_video(3, 4, 5, values);
    const ScoreGrid temporal = temporal_importance(video);
    const ScoreGrid spatial = spatial_importance(video);
    for (std::size_t t = 1; t < 3; ++t) {
        for (double x : temporal.row(t)) {
            EXPECT_DOUBLE_EQ(x, 0.0);
        }
    }
    // Frame 0 is scored against its own mean.
    EXPECT_TRUE(std::ranges::equal(temporal.row(0), spatial.row(0)));
}

TEST(VisualPrunerTest, TemporalImportanceAntipodalFrameIsTwo) {
    const ScoreGrid temporal = temporal_importance(antipodal_video(2, 4));
    for (double x : temporal.row(1)) {
        EXPECT_DOUBLE_EQ(x, 2.0);
    }
}

TEST(VisualPrunerTest, ScoresMatchLoopOracle) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng() % 6;
        const std::size_t f = 1 + rng() % 12;
        const std::size_t d = 1 + rng() % 16;
        const auto raw = oracle::random_video(rng, n, f, d);
        const auto video = make_video(n, f, d, raw);
        const auto ref = oracle::prune(raw, n, f, d, 1.0, false, 0.0);
        const ScoreGrid s = spatial_importance(video);
        const ScoreGrid t = temporal_importance(video);
        for (std::size_t i = 0; i < n * f; ++i) {
            EXPECT_NEAR(s.values()[i], ref.spatial[i], 1e-9);
            EXPECT_NEAR(t.values()[i], ref.temporal[i], 1e-9);
        }
    }
}

TEST(VisualPrunerTest, CombinedImportance) {
    const ScoreGrid s(1, 3, {0.1, 0.2, 0.3});
    const ScoreGrid t(1, 3, {1.0, 0.5, 0.0});
    EXPECT_EQ(combined_importance(s, t, 0.0), t);
    EXPECT_EQ(combined_importance(t, t, 1.0), ScoreGrid(1, 3, {2.0, 1.0, 0.0}));

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> sv(40), tv(40);
    for (std::size_t i = 0; i < 40; ++i) {
        sv[i] = u(rng);
        tv[i] = u(rng);
    }
    const ScoreGrid c = combined_importance(ScoreGrid(5, 8, sv), ScoreGrid(5, 8, tv), 0.5);
    for (std::size_t i = 0; i < 40; ++i) {
        EXPECT_NEAR(c.values()[i], tv[i] + 0.5 * sv[i], 1e-12);
    }
    EXPECT_THROW(combined_importance(ScoreGrid(1, 3), ScoreGrid(1, 4), 1.0), ShapeError);
}

TEST(VisualPrunerTest, FrameThresholdExamples) {
    const ScoreGrid spatial(3, 4, std::vector<double>(12, 0.0));
    const ScoreGrid temporal(3, 4, {0, 0, 0, 0, 2, 2, 2, 2, 2, 0, 0, 0});
    const auto th = frame_thresholds(spatial, temporal);
    EXPECT_DOUBLE_EQ(th[0], 0.0);  // spatial row of frame 0 is all zero
    EXPECT_DOUBLE_EQ(th[1], 1.0);  // |T| = 2 sqrt f
    EXPECT_DOUBLE_EQ(th[2], 0.5);  // |(2,0,0,0)| / (2 * 2)
}

TEST(VisualPrunerTest, FirstFrameThresholdUsesSpatialScores) {
    const ScoreGrid spatial(2, 4, {2, 0, 0, 0, 0, 0, 0, 0});
    const ScoreGrid temporal(2, 4, {0, 0, 0, 0, 0, 0, 0, 0});
    EXPECT_DOUBLE_EQ(frame_thresholds(spatial, temporal)[0], 0.5);
}

TEST(VisualPrunerTest, KeepCountRoundsHalfAwayAndClamps) {
    EXPECT_EQ(keep_count_for(0.0, 16), 1u);
    EXPECT_EQ(keep_count_for(0.03, 16), 1u);
    EXPECT_EQ(keep_count_for(0.5 / 16.0 * 3.0, 16), 2u);  // 1.5 -> 2
    EXPECT_EQ(keep_count_for(2.5 / 16.0, 16), 3u);        // 2.5 -> 3
    EXPECT_EQ(keep_count_for(1.0, 16), 16u);
}

TEST(VisualPrunerTest, SelectTopkExamples) {
    const std::vector<double> scores{0.1, 0.9, 0.9, 0.2};
    EXPECT_EQ(select_topk(scores, 4), (std::vector<std::size_t>{0, 1, 2, 3}));
    EXPECT_EQ(select_topk(scores, 2), (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(select_topk(std::vector<double>{0.5, 0.5, 0.5}, 1), (std::vector<std::size_t>{0}));
    EXPECT_EQ(select_topk(std::vector<double>{0.5, 0.7, 0.5, 0.7}, 3), (std::vector<std::size_t>{0, 1, 3}));
    EXPECT_THROW(select_topk(scores, 0), ValueError);
    EXPECT_THROW(select_topk(scores, 5), ValueError);
}

TEST(VisualPrunerTest, ConfigValidation) {
    EXPECT_THROW((PruneConfig{-0.1, PruneMode::adaptive, 1.6}.validate()), ConfigError);
    EXPECT_THROW((PruneConfig{1.0, PruneMode::manual, 4.1}.validate()), ConfigError);
    EXPECT_THROW((PruneConfig{1.0, PruneMode::manual, -0.1}.validate()), ConfigError);
    EXPECT_NO_THROW((PruneConfig{1.0, PruneMode::manual, 4.0}.validate()));
    EXPECT_NO_THROW((PruneConfig{1.0, PruneMode::adaptive, 99.0}.validate()));
}

TEST(VisualPrunerTest, AllStaticVideoKeepsOneTokenPerFrame) {
    const std::size_t n = 5, f = 8, d = 3;
    std::vector<double> values;
    for (std::size_t i = 0; i < n * f; ++i) {
        values.insert(values.end(), {0.3, -0.2, 0.9});
    }
    const auto r = prune_video(make_video(n, f, d, values), {});
    EXPECT_EQ(r.plan.keep_counts, std::vector<std::size_t>(n, 1));
    EXPECT_DOUBLE_EQ(r.pruned.vr, 1.0 / static_cast<double>(f));
    for (double th : r.plan.thresholds) {
        EXPECT_DOUBLE_EQ(th, 0.0);
    }
}

TEST(VisualPrunerTest, AntipodalFramesKeepEverything) {
    // Frame 0 is judged by spatial spread, so give it maximal spread too: tokens alternate direction.
    const std::size_t n = 4, f = 6;
    std::vector<double> values;
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t i = 0; i < f; ++i) {
            const double sign = ((t + i) % 2 == 0) ? 1.0 : -1.0;
            values.insert(values.end(), {sign, 0.0});
        }
    }
    const auto r = prune_video(make_video(n, f, 2, values), {});
    for (std::size_t t = 1; t < n; ++t) {
        EXPECT_NEAR(r.plan.thresholds[t], 1.0, 1e-9);
    }
    // Frame 0's mean is the zero vector, so every spatial score is dissim(x, 0) = 1 -> threshold 1/2.
    EXPECT_NEAR(r.plan.thresholds[0], 0.5, 1e-12);
    EXPECT_EQ(r.plan.keep_counts[1], f);
}

TEST(VisualPrunerTest, ManualModeKeepsScoresAboveK) {
    const auto video = antipodal_video(3, 4);
    const auto r = prune_video(video, {1.0, PruneMode::manual, 1.6});
    for (std::size_t t = 0; t < 3; ++t) {
        const auto scores = r.importance.combined.row(t);
        std::vector<std::size_t> expected;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i] >= 1.6) {
                expected.push_back(i);
            }
        }
        if (expected.empty()) {
            expected.push_back(static_cast<std::size_t>(std::ranges::max_element(scores) - scores.begin()));
        }
        EXPECT_EQ(r.plan.kept_indices[t], expected);
    }
    // K = 0 keeps everything.
    EXPECT_DOUBLE_EQ(prune_video(video, {1.0, PruneMode::manual, 0.0}).pruned.vr, 1.0);
}

TEST(VisualPrunerTest, ManualModeFloorIsArgmax) {
    const auto video = make_video(1, 3, 2, {1.0, 0.0, 1.0, 0.1, 0.0, 1.0});
    const auto r = prune_video(video, {1.0, PruneMode::manual, 4.0});
    ASSERT_EQ(r.plan.kept_indices[0].size(), 1u);
    EXPECT_EQ(r.plan.kept_indices[0][0], 2u);
}

TEST(VisualPrunerTest, MatchesStraightLineReferenceBothModes) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> wdist(0.0, 2.0);
    for (int seed = 0; seed < 50; ++seed) {
        const std::size_t n = 1 + rng() % 8;
        const std::size_t f = 1 + rng() % 16;
        const std::size_t d = 1 + rng() % 32;
        const auto raw = oracle::random_video(rng, n, f, d);
        const auto video = make_video(n, f, d, raw);
        const double w = wdist(rng);
        std::uniform_real_distribution<double> kdist(0.0, 2.0 * (1.0 + w));
        const double k = kdist(rng);

        const auto adaptive = prune_video(video, {w, PruneMode::adaptive, k});
        const auto ref_adaptive = oracle::prune(raw, n, f, d, w, false, k);
        EXPECT_EQ(adaptive.plan.kept_indices, ref_adaptive.kept) << "seed " << seed;
        for (std::size_t t = 0; t < n; ++t) {
            EXPECT_NEAR(adaptive.plan.thresholds[t], ref_adaptive.thresholds[t], 1e-9);
        }

        const auto manual = prune_video(video, {w, PruneMode::manual, k});
        const auto ref_manual = oracle::prune(raw, n, f, d, w, true, k);
        EXPECT_EQ(manual.plan.kept_indices, ref_manual.kept) << "seed " << seed;
    }
}

TEST(VisualPrunerTest, PlanInvariants) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng() % 8, f = 1 + rng() % 16, d = 1 + rng() % 16;
        const auto video = random_video(rng, n, f, d);
        for (PruneMode mode : {PruneMode::adaptive, PruneMode::manual}) {
            const auto r = prune_video(video, {1.0, mode, 1.6});
            std::size_t total = 0;
            for (std::size_t t = 0; t < n; ++t) {
                const auto& kept = r.plan.kept_indices[t];
                EXPECT_EQ(kept.size(), r.plan.keep_counts[t]);
                EXPECT_GE(kept.size(), 1u);
                EXPECT_LE(kept.size(), f);
                EXPECT_TRUE(std::ranges::is_sorted(kept));
                EXPECT_EQ(std::ranges::adjacent_find(kept), kept.end());
                EXPECT_LT(kept.back(), f);
                EXPECT_GE(r.plan.thresholds[t], 0.0);
                EXPECT_LE(r.plan.thresholds[t], 1.0);
                if (mode == PruneMode::adaptive) {
                    EXPECT_EQ(r.plan.keep_counts[t], keep_count_for(r.plan.thresholds[t], f));
                }
                total += kept.size();
            }
            EXPECT_EQ(r.pruned.tokens.rows(), total);
            EXPECT_DOUBLE_EQ(r.pruned.vr, static_cast<double>(total) / static_cast<double>(n * f));
            for (std::size_t i = 1; i < r.pruned.origin.size(); ++i) {
                const auto& a = r.pruned.origin[i - 1];
                const auto& b = r.pruned.origin[i];
                EXPECT_TRUE(a.frame < b.frame || (a.frame == b.frame && a.index < b.index));
            }
            for (std::size_t i = 0; i < r.pruned.origin.size(); ++i) {
                const auto& o = r.pruned.origin[i];
                EXPECT_TRUE(std::ranges::equal(r.pruned.tokens.row(i), video.frame(o.frame).row(o.index)));
            }
        }
    }
}

TEST(VisualPrunerTest, PositiveScalingLeavesPlanUnchanged) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> alpha_dist(0.01, 100.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng() % 6, f = 2 + rng() % 14, d = 2 + rng() % 30;
        const auto raw = oracle::random_video(rng, n, f, d);
        const double alpha = alpha_dist(rng);
        auto scaled = raw;
        for (double& x : scaled) {
            x *= alpha;
        }
        const auto a = prune_video(make_video(n, f, d, raw), {});
        const auto b = prune_video(make_video(n, f, d, scaled), {});
        EXPECT_EQ(a.plan.kept_indices, b.plan.kept_indices);
        EXPECT_EQ(a.plan.keep_counts, b.plan.keep_counts);
        for (std::size_t t = 0; t < n; ++t) {
            EXPECT_NEAR(a.plan.thresholds[t], b.plan.thresholds[t], 1e-12);
        }
    }
}

TEST(VisualPrunerTest, PermutingTokensPermutesScores) {
    std::mt19937_64 rng(55);
    const std::size_t n = 3, f = 7, d = 5;
    const auto raw = oracle::random_video(rng, n, f, d);
    std::vector<std::size_t> perm(f);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::ranges::shuffle(perm, rng);
    std::vector<double> permuted(raw.size());
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t i = 0; i < f; ++i) {
            std::copy_n(raw.begin() + static_cast<std::ptrdiff_t>((t * f + perm[i]) * d), d,
                        permuted.begin() + static_cast<std::ptrdiff_t>((t * f + i) * d));
        }
    }
    const auto a = make_video(n, f, d, raw);
    const auto b = make_video(n, f, d, permuted);
    const ScoreGrid sa = spatial_importance(a), sb = spatial_importance(b);
    const ScoreGrid ta = temporal_importance(a), tb = temporal_importance(b);
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t i = 0; i < f; ++i) {
            EXPECT_NEAR(sb.at(t, i), sa.at(t, perm[i]), 1e-12);
            EXPECT_NEAR(tb.at(t, i), ta.at(t, perm[i]), 1e-12);
        }
    }
}

TEST(VisualPrunerTest, ThresholdVanishesWhenFrameRepeatsDirection) {
    std::mt19937_64 rng(8);
    const std::size_t n = 3, f = 4, d = 6;
    auto raw = oracle::random_video(rng, n, f, d);
    // Frame 1 = 2.5 * frame 0 (same directions), frame 2 differs.
    for (std::size_t i = 0; i < f * d; ++i) {
        raw[f * d + i] = 2.5 * raw[i];
    }
    const auto r = prune_video(make_video(n, f, d, raw), {});
    EXPECT_NEAR(r.plan.thresholds[1], 0.0, 1e-7);
    EXPECT_EQ(r.plan.keep_counts[1], 1u);
    EXPECT_GT(r.plan.thresholds[2], 0.0);
}

TEST(VisualPrunerTest, KeepAllIsIdentity) {
    std::mt19937_64 rng(4);
    const auto video = random_video(rng, 3, 5, 4);
    const PrunedVideo all = keep_all(video);
    EXPECT_EQ(all.tokens, video.data());
    EXPECT_DOUBLE_EQ(all.vr, 1.0);
    EXPECT_EQ(all.origin.size(), 15u);
}

TEST(VisualPrunerTest, ScoringCostScalingReportsEveryShape) {
    const std::vector<VideoShape> shapes = {{2, 8, 8}, {4, 8, 8}};
    const auto points = scoring_cost_scaling(shapes, 3, 1);
    ASSERT_EQ(points.size(), 2u);
    EXPECT_EQ(points[1].shape.frames, 4u);
    EXPECT_GT(points[0].median_seconds, 0.0);
    EXPECT_THROW(scoring_cost_scaling(shapes, 0, 1), ConfigError);
}

}  // namespace
}  // namespace sharpv
