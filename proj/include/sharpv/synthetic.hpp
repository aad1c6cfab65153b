// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sharpv/visual_pruner.hpp"

namespace sharpv {

/// Every frame repeats its predecessor. As a whole-video pattern, frame 0 is also a single
/// random token repeated f times, so the scene carries no spatial or temporal variation.
struct StaticPattern {};

/// Each moving token rotates by pi * rate radians per frame inside its own fixed 2-plane, so
/// consecutive frames differ by exactly 2 sin(pi * rate / 2) in dissimilarity. A seeded
/// subset of round(moving_fraction * f) tokens moves; the rest hold still.
struct UniformMotion {
    double rate = 0.1;
    double moving_fraction = 1.0;
};

/// Listed frames (0-based) get fresh random tokens; every other frame repeats its predecessor.
struct Burst {
    std::vector<std::size_t> frames;
};

struct MotionSegment {
    std::size_t frames = 1;
    std::variant<StaticPattern, UniformMotion, Burst> pattern;  // burst frames are segment-relative
};

/// Consecutive segments; their frame counts must sum to n.
struct Mixed {
    std::vector<MotionSegment> segments;
};

using VideoPattern = std::variant<StaticPattern, UniformMotion, Burst, Mixed>;

struct SyntheticVideoSpec {
    std::size_t frames = 8;
    std::size_t tokens_per_frame = 16;
    std::size_t dim = 64;
    VideoPattern pattern = StaticPattern{};
    std::uint64_t seed = 42;
};

/// Deterministic in (spec, seed). Frame 0 holds random tokens with entries ~ N(0, 1/d)
/// (one repeated token for StaticPattern); later frames follow the pattern. All values are
/// exactly representable as float32, so a video survives a round trip through the tensor
/// file format unchanged.
VideoTokens gen_synthetic_video(const SyntheticVideoSpec& spec);

/// Default recipe behind `--pattern mixed`: a static opening, a stretch of partial motion,
/// a single-frame burst, then a static tail.
Mixed default_mixed_pattern(std::size_t frames);

/// Parses "static", "uniform_motion", "burst" or "mixed" into a pattern using the given
/// motion rate and burst frames. Throws ConfigError on unknown names.
VideoPattern parse_pattern(const std::string& name,
                           double rate,
                           const std::vector<std::size_t>& burst_frames,
                           std::size_t frames);

std::string pattern_name(const VideoPattern& pattern);

}  // namespace sharpv
