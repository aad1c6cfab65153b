// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sharpv/harness.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "sharpv/error.hpp"
#include "sharpv/rng.hpp"
#include "sharpv/tensor_io.hpp"

namespace sharpv {

namespace {

using nlohmann::json;

std::size_t get_count(const json& v, const std::string& key) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw ConfigError("config key '" + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

double get_real(const json& v, const std::string& key) {
    if (!v.is_number()) {
        throw ConfigError("config key '" + key + "' must be a number");
    }
    return v.get<double>();
}

std::string get_string(const json& v, const std::string& key) {
    if (!v.is_string()) {
        throw ConfigError("config key '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) {
        throw ConfigError("config key '" + key + "' must be a boolean");
    }
    return v.get<bool>();
}

void apply_decoder_json(DecoderConfig& d, const json& j) {
    if (!j.is_object()) {
        throw ConfigError("config key 'decoder' must be an object");
    }
    const std::map<std::string, std::function<void(const json&)>> setters = {
        {"layers", [&](const json& v) { d.layers = get_count(v, "decoder.layers"); }},
        {"model_dim", [&](const json& v) { d.model_dim = get_count(v, "decoder.model_dim"); }},
        {"heads", [&](const json& v) { d.heads = get_count(v, "decoder.heads"); }},
        {"mlp_dim", [&](const json& v) { d.mlp_dim = get_count(v, "decoder.mlp_dim"); }},
        {"vocab", [&](const json& v) { d.vocab = get_count(v, "decoder.vocab"); }},
        {"max_positions", [&](const json& v) { d.max_positions = get_count(v, "decoder.max_positions"); }},
        {"seed", [&](const json& v) { d.seed = get_count(v, "decoder.seed"); }},
        {"residual_scale", [&](const json& v) { d.residual_scale = get_real(v, "decoder.residual_scale"); }},
    };
    for (const auto& [key, value] : j.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError("unknown config key 'decoder." + key + "'");
        }
        it->second(value);
    }
}

json snapshot_json(const std::vector<LayerSnapshot>& layers) {
    json out = json::array();
    for (const auto& s : layers) {
        json entry;
        for (std::size_t i = 0; i < kSegmentCount; ++i) {
            entry[std::string(to_string(static_cast<Segment>(i)))] = s.entries[i];
        }
        entry["total"] = s.total;
        entry["bytes"] = s.bytes;
        out.push_back(std::move(entry));
    }
    return out;
}

json decoder_json(const DecoderConfig& d) {
    return {{"layers", d.layers},   {"model_dim", d.model_dim}, {"heads", d.heads},
            {"mlp_dim", d.mlp_dim}, {"vocab", d.vocab},         {"max_positions", d.max_positions},
            {"seed", d.seed},       {"visual_dim", d.effective_visual_dim()},
            {"residual_scale", d.residual_scale}};
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InvariantError*>(&e) != nullptr) {
        return kExitInvariant;
    }
    if (dynamic_cast<const IoError*>(&e) != nullptr) {
        return kExitIo;
    }
    if (dynamic_cast<const std::invalid_argument*>(&e) != nullptr) {
        return kExitConfig;
    }
    return kExitInvariant;
}

void HarnessConfig::validate() const {
    if (mode != "adaptive" && mode != "manual") {
        throw ConfigError("mode must be 'adaptive' or 'manual', got '" + mode + "'");
    }
    if (!input) {
        if (n == 0 || f == 0 || d == 0) {
            throw ConfigError("n, f and d must be >= 1");
        }
        (void)parse_pattern(pattern, rate, burst_frames, n);
    }
    sharpv().validate();
    decoder.validate();
}

SharpVConfig HarnessConfig::sharpv() const {
    SharpVConfig c;
    c.visual_pruning = visual_pruning;
    c.prune.w = w;
    c.prune.k = k;
    c.prune.mode = mode == "manual" ? PruneMode::manual : PruneMode::adaptive;
    c.m = m;
    c.decode_steps = decode_steps;
    return c;
}

DecoderConfig HarnessConfig::decoder_for(std::size_t visual_dim) const {
    DecoderConfig c = decoder;
    c.visual_dim = visual_dim == c.model_dim ? 0 : visual_dim;
    return c;
}

SyntheticVideoSpec HarnessConfig::video_spec() const {
    SyntheticVideoSpec spec;
    spec.frames = n;
    spec.tokens_per_frame = f;
    spec.dim = d;
    spec.seed = seed;
    spec.pattern = parse_pattern(pattern, rate, burst_frames, n);
    return spec;
}

void apply_json(HarnessConfig& c, const json& j) {
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    const std::map<std::string, std::function<void(const json&)>> setters = {
        {"pattern", [&](const json& v) { c.pattern = get_string(v, "pattern"); }},
        {"rate", [&](const json& v) { c.rate = get_real(v, "rate"); }},
        {"burst_frames",
         [&](const json& v) {
             if (!v.is_array()) {
                 throw ConfigError("config key 'burst_frames' must be an array");
             }
             c.burst_frames.clear();
             for (const auto& x : v) {
                 c.burst_frames.push_back(get_count(x, "burst_frames"));
             }
         }},
        {"n", [&](const json& v) { c.n = get_count(v, "n"); }},
        {"f", [&](const json& v) { c.f = get_count(v, "f"); }},
        {"d", [&](const json& v) { c.d = get_count(v, "d"); }},
        {"seed", [&](const json& v) { c.seed = get_count(v, "seed"); }},
        {"mode", [&](const json& v) { c.mode = get_string(v, "mode"); }},
        {"w", [&](const json& v) { c.w = get_real(v, "w"); }},
        {"k", [&](const json& v) { c.k = get_real(v, "k"); }},
        {"m", [&](const json& v) { c.m = get_real(v, "m"); }},
        {"decode_steps", [&](const json& v) { c.decode_steps = get_count(v, "decode_steps"); }},
        {"visual_pruning", [&](const json& v) { c.visual_pruning = get_bool(v, "visual_pruning"); }},
        {"system_len", [&](const json& v) { c.system_len = get_count(v, "system_len"); }},
        {"instruction_len", [&](const json& v) { c.instruction_len = get_count(v, "instruction_len"); }},
        {"in", [&](const json& v) { c.input = get_string(v, "in"); }},
        {"out", [&](const json& v) { c.output = get_string(v, "out"); }},
        {"decoder", [&](const json& v) { apply_decoder_json(c.decoder, v); }},
    };
    for (const auto& [key, value] : j.items()) {
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
        it->second(value);
    }
}

PipelineOutput run_harness(const HarnessConfig& config) {
    config.validate();
    const VideoTokens video = config.input ? read_tensor_file(*config.input) : gen_synthetic_video(config.video_spec());
    const Decoder decoder(config.decoder_for(video.dim()));
    const PromptEmbeddings prompt = make_prompt(decoder, config.system_len, config.instruction_len, config.seed + 1);
    return run_pipeline(decoder, video, prompt, config.sharpv());
}

json report_to_json(const PipelineOutput& output, const HarnessConfig& config) {
    const RunReport& r = output.report;
    json cfg = {
        {"mode", config.mode},
        {"w", config.w},
        {"k", config.k},
        {"m", config.m},
        {"decode_steps", config.decode_steps},
        {"visual_pruning", config.visual_pruning},
        {"seed", config.seed},
        {"system_len", config.system_len},
        {"instruction_len", config.instruction_len},
        {"decoder", decoder_json(r.decoder)},
    };
    if (config.input) {
        cfg["input"] = *config.input;
    } else {
        cfg["pattern"] = config.pattern;
        cfg["rate"] = config.rate;
        cfg["burst_frames"] = config.burst_frames;
    }
    cfg["n"] = r.per_frame_thresholds.size();
    cfg["f"] = r.per_frame_thresholds.empty() ? 0 : r.visual_tokens_before / r.per_frame_thresholds.size();
    cfg["d"] = r.decoder.effective_visual_dim();

    return {
        {"schema_version", kReportSchemaVersion},
        {"config", std::move(cfg)},
        {"vr", r.vr},
        {"mr", r.mr},
        {"token_budget", r.token_budget},
        {"visual_tokens", {{"before", r.visual_tokens_before}, {"after", r.visual_tokens_after}}},
        {"per_frame_thresholds", r.per_frame_thresholds},
        {"per_frame_keep_counts", r.per_frame_keep_counts},
        {"per_layer_sim", r.per_layer_sim},
        {"discarded_layers", r.discarded_layers},
        {"cache",
         {{"bytes_before", r.cache_bytes_before},
          {"bytes_after", r.cache_bytes_after},
          {"layers_before", snapshot_json(r.cache_before)},
          {"layers_after", snapshot_json(r.cache_after)}}},
        {"generated_tokens", output.tokens},
        {"timing", {{"ttft_seconds", r.ttft_seconds}, {"tpot_seconds", r.tpot_seconds}}},
    };
}

void BenchConfig::validate() const {
    if (n == 0 || f == 0 || d == 0 || cache_base_len == 0) {
        throw ConfigError("bench: n, f, d and cache_base_len must be >= 1");
    }
    if (repetitions < 20) {
        throw ConfigError("bench: at least 20 repetitions per size");
    }
    if (ladder.size() < 3 || ladder.front() != 1) {
        throw ConfigError("bench: ladder needs >= 3 multipliers starting at 1");
    }
    for (std::size_t x : ladder) {
        if (x == 0) {
            throw ConfigError("bench: ladder multipliers must be >= 1");
        }
    }
    decoder.validate();
}

BenchResult run_bench(const BenchConfig& config) {
    config.validate();
    BenchResult result;

    std::vector<VideoShape> token_shapes;
    std::vector<VideoShape> dim_shapes;
    for (std::size_t x : config.ladder) {
        token_shapes.push_back({config.n * x, config.f, config.d});
        dim_shapes.push_back({config.n, config.f, config.d * x});
    }
    result.token_scaling = scoring_cost_scaling(token_shapes, config.repetitions, config.seed);
    result.dim_scaling = scoring_cost_scaling(dim_shapes, config.repetitions, config.seed);

    const Decoder decoder(config.decoder);
    GaussianRng rng(config.seed);
    for (std::size_t x : config.ladder) {
        const std::size_t len = config.cache_base_len * x;
        std::vector<double> values(len * config.decoder.model_dim);
        for (double& v : values) {
            v = rng.normal() / std::sqrt(static_cast<double>(config.decoder.model_dim));
        }
        const auto spans = SegmentedSequence::from_lengths(0, len, 0);
        const PrefillResult prefill = decoder.prefill(Mat(len, config.decoder.model_dim, std::move(values)), spans);
        result.cache_scaling.push_back({len, prefill.cache.byte_footprint()});
    }
    return result;
}

json bench_to_json(const BenchResult& result, const BenchConfig& config) {
    const auto scaling = [](const std::vector<ScalingPoint>& points) {
        json out = json::array();
        for (const auto& p : points) {
            out.push_back({{"n", p.shape.frames},
                           {"f", p.shape.tokens_per_frame},
                           {"d", p.shape.dim},
                           {"tokens", p.shape.frames * p.shape.tokens_per_frame},
                           {"median_seconds", p.median_seconds},
                           {"ratio", p.median_seconds / points.front().median_seconds}});
        }
        return out;
    };
    json cache = json::array();
    for (const auto& c : result.cache_scaling) {
        cache.push_back({{"retained_len", c.retained_len},
                         {"bytes", c.bytes},
                         {"ratio", static_cast<double>(c.bytes) /
                                       static_cast<double>(result.cache_scaling.front().bytes)}});
    }
    return {{"repetitions", config.repetitions},
            {"ladder", config.ladder},
            {"token_scaling", scaling(result.token_scaling)},
            {"dim_scaling", scaling(result.dim_scaling)},
            {"cache_scaling", std::move(cache)}};
}

}  // namespace sharpv
