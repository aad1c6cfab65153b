// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sharpv/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "sharpv/error.hpp"
#include "sharpv/rng.hpp"

namespace sharpv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

bool is_ratio(double x) {
    return x > 0.0 && x <= 1.0;
}

}  // namespace

PromptEmbeddings make_prompt(const Decoder& decoder,
                             std::size_t system_len,
                             std::size_t instruction_len,
                             std::uint64_t seed) {
    GaussianRng rng(seed);
    const auto vocab = decoder.config().vocab;
    const auto draw = [&](std::size_t n) {
        std::vector<std::int32_t> ids(n);
        for (auto& id : ids) {
            id = static_cast<std::int32_t>(rng.next_u64() % vocab);
        }
        return decoder.embed_tokens(ids);
    };
    PromptEmbeddings prompt;
    prompt.system = draw(system_len);
    prompt.instruction = draw(instruction_len);
    return prompt;
}

void SharpVConfig::validate() const {
    prune.validate();
    if (std::isnan(m) || m < -1.0 || m > 1.0) {
        throw ConfigError("M must lie in [-1, 1]");
    }
    if (decode_steps == 0) {
        throw ConfigError("decode_steps must be >= 1");
    }
}

Mat assemble_prompt(const Decoder& decoder, const PromptEmbeddings& prompt, const Mat& visual_tokens) {
    const std::size_t d = decoder.config().model_dim;
    const Mat visual = decoder.project_visual(visual_tokens);
    const auto check_width = [d](const Mat& m, const char* what) {
        if (m.rows() > 0 && m.cols() != d) {
            throw ShapeError(std::string(what) + " embeddings must have model_dim columns");
        }
    };
    check_width(prompt.system, "system");
    check_width(prompt.instruction, "instruction");

    std::vector<double> values;
    values.reserve((prompt.system.rows() + visual.rows() + prompt.instruction.rows()) * d);
    for (const Mat* part : {&prompt.system, &visual, &prompt.instruction}) {
        values.insert(values.end(), part->values().begin(), part->values().end());
    }
    return Mat(prompt.system.rows() + visual.rows() + prompt.instruction.rows(), d, std::move(values));
}

PipelineOutput run_pipeline(const Decoder& decoder,
                            const VideoTokens& video,
                            const PromptEmbeddings& prompt,
                            const SharpVConfig& config) {
    config.validate();
    PipelineOutput out;
    RunReport& report = out.report;
    report.config = config;
    report.decoder = decoder.config();

    const auto start = Clock::now();

    PrunedVideo pruned;
    if (config.visual_pruning) {
        PruneResult result = prune_video(video, config.prune);
        report.per_frame_thresholds = result.plan.thresholds;
        report.per_frame_keep_counts = result.plan.keep_counts;
        pruned = std::move(result.pruned);
    } else {
        pruned = keep_all(video);
        report.per_frame_thresholds = frame_thresholds(spatial_importance(video), temporal_importance(video));
        report.per_frame_keep_counts.assign(video.frames(), video.tokens_per_frame());
    }
    report.vr = pruned.vr;
    report.visual_tokens_before = video.token_count();
    report.visual_tokens_after = pruned.tokens.rows();

    const Mat embedded = assemble_prompt(decoder, prompt, pruned.tokens);
    const auto spans =
        SegmentedSequence::from_lengths(prompt.system.rows(), pruned.tokens.rows(), prompt.instruction.rows());
    PrefillResult prefill = decoder.prefill(embedded, spans);

    const DegradationProfile profile = degradation_profile(prefill.trace.layer_inputs, embedded, spans);
    const DiscardPlan plan = discard_decision(profile, config.m);
    LayeredKVCache cache = reencode_positions(apply_discard(prefill.cache, plan, spans));

    report.per_layer_sim = profile.per_layer_sim;
    for (std::size_t l = 0; l < plan.per_layer.size(); ++l) {
        if (plan.per_layer[l]) {
            report.discarded_layers.push_back(l);
        }
    }
    report.mr = mr_metric(prefill.cache, cache);
    report.token_budget = report.vr * report.mr;
    report.cache_before = snapshot(prefill.cache);
    report.cache_after = snapshot(cache);
    report.cache_bytes_before = prefill.cache.byte_footprint();
    report.cache_bytes_after = cache.byte_footprint();

    out.tokens.push_back(Decoder::argmax(prefill.logits));
    const auto first_token = Clock::now();
    report.ttft_seconds = seconds_between(start, first_token);

    while (out.tokens.size() < config.decode_steps) {
        const StepResult step = decoder.decode_step(cache, decoder.token_embedding(out.tokens.back()));
        out.tokens.push_back(Decoder::argmax(step.logits));
    }
    const std::size_t later = out.tokens.size() - 1;
    report.tpot_seconds = later == 0 ? 0.0 : seconds_between(first_token, Clock::now()) / static_cast<double>(later);

    check_report(report);
    return out;
}

std::vector<std::int32_t> run_baseline(const Decoder& decoder,
                                       const VideoTokens& video,
                                       const PromptEmbeddings& prompt,
                                       std::size_t decode_steps) {
    const Mat embedded = assemble_prompt(decoder, prompt, video.data());
    const auto spans =
        SegmentedSequence::from_lengths(prompt.system.rows(), video.token_count(), prompt.instruction.rows());
    return greedy_generate(decoder, embedded, spans, decode_steps);
}

void check_report(const RunReport& report) {
    const auto fail = [](const std::string& what) { throw InvariantError("run report: " + what); };
    if (!is_ratio(report.vr) || !is_ratio(report.mr) || !is_ratio(report.token_budget)) {
        fail("vr, mr and token_budget must lie in (0, 1]");
    }
    if (report.token_budget != report.vr * report.mr) {
        fail("token_budget != vr * mr");
    }
    if (report.per_frame_thresholds.size() != report.per_frame_keep_counts.size()) {
        fail("threshold and keep-count lists differ in length");
    }
    for (double t : report.per_frame_thresholds) {
        if (!(t >= 0.0 && t <= 1.0)) {
            fail("per-frame threshold outside [0, 1]");
        }
    }
    if (report.per_layer_sim.size() != report.decoder.layers) {
        fail("per_layer_sim length != decoder layers");
    }
    if (report.cache_bytes_after > report.cache_bytes_before) {
        fail("eviction grew the cache");
    }
}

}  // namespace sharpv
