// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sharpv/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sharpv/error.hpp"
#include "sharpv/rng.hpp"

namespace sharpv {

namespace {

double to_float_grid(double x) {
    return static_cast<double>(static_cast<float>(x));
}

// A video pattern flattened to one rule per frame index >= 1.
struct FrameRule {
    enum class Kind { hold, rotate, fresh } kind = Kind::hold;
    std::size_t anchor = 0;        // rotate: frame the rotation is measured from
    std::size_t segment = 0;       // rotate: which motion segment (owns the 2-planes)
    const UniformMotion* motion = nullptr;
};

struct Builder {
    std::vector<FrameRule> rules;
    std::vector<const UniformMotion*> motions;

    void add(const StaticPattern&, std::size_t, std::size_t) {}

    void add(const UniformMotion& motion, std::size_t begin, std::size_t count) {
        const std::size_t segment = motions.size();
        motions.push_back(&motion);
        const std::size_t anchor = begin == 0 ? 0 : begin - 1;
        for (std::size_t t = std::max<std::size_t>(begin, 1); t < begin + count; ++t) {
            rules[t] = {FrameRule::Kind::rotate, anchor, segment, &motion};
        }
    }

    void add(const Burst& burst, std::size_t begin, std::size_t count) {
        for (std::size_t rel : burst.frames) {
            if (rel >= count) {
                throw ConfigError("burst frame " + std::to_string(rel) + " outside its " + std::to_string(count) +
                                  "-frame span");
            }
            if (begin + rel >= 1) {
                rules[begin + rel] = {FrameRule::Kind::fresh};
            }
        }
    }

    void add(const Mixed& mixed, std::size_t, std::size_t total) {
        std::size_t begin = 0;
        for (const auto& seg : mixed.segments) {
            if (seg.frames == 0) {
                throw ConfigError("mixed segment with zero frames");
            }
            if (begin + seg.frames > total) {
                break;
            }
            std::visit([&](const auto& p) { add(p, begin, seg.frames); }, seg.pattern);
            begin += seg.frames;
        }
        if (begin != total) {
            throw ConfigError("mixed segments cover " + std::to_string(begin) + " frames, video has " +
                              std::to_string(total));
        }
    }
};

void validate_motion(const UniformMotion& m) {
    if (!std::isfinite(m.rate) || m.rate < 0.0 || m.rate > 1.0) {
        throw ConfigError("uniform_motion rate must lie in [0, 1]");
    }
    if (!std::isfinite(m.moving_fraction) || m.moving_fraction < 0.0 || m.moving_fraction > 1.0) {
        throw ConfigError("uniform_motion moving_fraction must lie in [0, 1]");
    }
}

}  // namespace

VideoTokens gen_synthetic_video(const SyntheticVideoSpec& spec) {
    const std::size_t n = spec.frames;
    const std::size_t f = spec.tokens_per_frame;
    const std::size_t d = spec.dim;
    if (n == 0 || f == 0 || d == 0) {
        throw ConfigError("synthetic video needs n, f, d >= 1");
    }

    Builder builder;
    builder.rules.assign(n, FrameRule{});
    std::visit([&](const auto& p) { builder.add(p, 0, n); }, spec.pattern);
    for (const auto* m : builder.motions) {
        validate_motion(*m);
    }

    GaussianRng rng(spec.seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    const auto fresh_frame = [&](std::span<double> out) {
        for (double& x : out) {
            x = to_float_grid(rng.normal() * scale);
        }
    };

    std::vector<double> values(n * f * d);
    const auto frame = [&](std::size_t t) { return std::span<double>(values).subspan(t * f * d, f * d); };
    if (std::holds_alternative<StaticPattern>(spec.pattern)) {
        // A fully static scene: one random token repeated everywhere.
        const auto first = frame(0);
        fresh_frame(first.first(d));
        for (std::size_t i = 1; i < f; ++i) {
            std::copy_n(first.begin(), d, first.begin() + static_cast<std::ptrdiff_t>(i * d));
        }
    } else {
        fresh_frame(frame(0));
    }

    // Per motion segment: which tokens move, and each moving token's orthonormal plane (u, v) and radius.
    struct Plane {
        std::vector<double> u, v;
        double radius = 0.0;
    };
    std::vector<std::vector<Plane>> planes(builder.motions.size());
    std::vector<std::vector<bool>> moving(builder.motions.size());

    const auto setup_motion = [&](std::size_t segment, std::size_t anchor) {
        const UniformMotion& motion = *builder.motions[segment];
        std::vector<std::size_t> order(f);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = f; i > 1; --i) {
            std::swap(order[i - 1], order[rng.next_u64() % i]);
        }
        const auto count = static_cast<std::size_t>(std::round(motion.moving_fraction * static_cast<double>(f)));
        moving[segment].assign(f, false);
        for (std::size_t i = 0; i < count; ++i) {
            moving[segment][order[i]] = true;
        }
        planes[segment].resize(f);
        const auto base = frame(anchor);
        for (std::size_t i = 0; i < f; ++i) {
            Plane& p = planes[segment][i];
            p.u.assign(base.begin() + i * d, base.begin() + (i + 1) * d);
            p.radius = l2_norm(p.u);
            p.v.resize(d);
            for (double& x : p.v) {
                x = rng.normal();
            }
            if (p.radius < kNormEpsilon || d < 2) {
                continue;
            }
            for (double& x : p.u) {
                x /= p.radius;
            }
            const double proj = dot(p.v, p.u);
            for (std::size_t j = 0; j < d; ++j) {
                p.v[j] -= proj * p.u[j];
            }
            const double vn = l2_norm(p.v);
            for (double& x : p.v) {
                x /= vn;
            }
        }
    };

    std::vector<bool> ready(builder.motions.size(), false);
    for (std::size_t t = 1; t < n; ++t) {
        const FrameRule& rule = builder.rules[t];
        const auto out = frame(t);
        switch (rule.kind) {
            case FrameRule::Kind::hold: {
                const auto prev = frame(t - 1);
                std::ranges::copy(prev, out.begin());
                break;
            }
            case FrameRule::Kind::fresh:
                fresh_frame(out);
                break;
            case FrameRule::Kind::rotate: {
                if (!ready[rule.segment]) {
                    setup_motion(rule.segment, rule.anchor);
                    ready[rule.segment] = true;
                }
                const double angle =
                    std::numbers::pi * rule.motion->rate * static_cast<double>(t - rule.anchor);
                const double c = std::cos(angle);
                const double s = std::sin(angle);
                const auto anchor = frame(rule.anchor);
                for (std::size_t i = 0; i < f; ++i) {
                    const Plane& p = planes[rule.segment][i];
                    const bool rotates = moving[rule.segment][i] && p.radius >= kNormEpsilon && d >= 2;
                    for (std::size_t j = 0; j < d; ++j) {
                        out[i * d + j] = rotates ? to_float_grid(p.radius * (c * p.u[j] + s * p.v[j]))
                                                 : anchor[i * d + j];
                    }
                }
                break;
            }
        }
    }

    return VideoTokens(n, f, Mat(n * f, d, std::move(values)));
}

Mixed default_mixed_pattern(std::size_t frames) {
    Mixed mixed;
    std::size_t left = frames;
    const auto take = [&](std::size_t want, std::variant<StaticPattern, UniformMotion, Burst> pattern) {
        const std::size_t count = std::min(want, left);
        if (count > 0) {
            mixed.segments.push_back({count, std::move(pattern)});
            left -= count;
        }
    };
    take(std::max<std::size_t>(1, frames / 4), StaticPattern{});
    take(std::max<std::size_t>(1, frames * 3 / 8), UniformMotion{0.25, 0.5});
    take(1, Burst{{0}});
    take(left, StaticPattern{});
    return mixed;
}

VideoPattern parse_pattern(const std::string& name,
                           double rate,
                           const std::vector<std::size_t>& burst_frames,
                           std::size_t frames) {
    if (name == "static") {
        return StaticPattern{};
    }
    if (name == "uniform_motion") {
        return UniformMotion{rate, 1.0};
    }
    if (name == "burst") {
        for (std::size_t b : burst_frames) {
            if (b >= frames) {
                throw ConfigError("burst frame " + std::to_string(b) + " >= n");
            }
        }
        return Burst{burst_frames};
    }
    if (name == "mixed") {
        return default_mixed_pattern(frames);
    }
    throw ConfigError("unknown pattern '" + name + "' (expected static, uniform_motion, burst or mixed)");
}

std::string pattern_name(const VideoPattern& pattern) {
    static constexpr const char* names[] = {"static", "uniform_motion", "burst", "mixed"};
    return names[pattern.index()];
}

}  // namespace sharpv
