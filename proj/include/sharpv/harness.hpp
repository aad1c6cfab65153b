// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sharpv/pipeline.hpp"
#include "sharpv/synthetic.hpp"

namespace sharpv {

inline constexpr int kReportSchemaVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitInvariant = 4;

/// Process exit code for an exception escaping a subcommand: InvariantError -> 4,
/// IoError -> 3, bad input (std::invalid_argument) -> 2. Anything else counts as an
/// invariant violation.
int exit_code_for(const std::exception& e);

/// Everything one `run` needs. Defaults < config file < command-line flags.
struct HarnessConfig {
    std::string pattern = "mixed";
    double rate = 0.1;
    std::vector<std::size_t> burst_frames = {4};
    std::size_t n = 8;
    std::size_t f = 16;
    std::size_t d = 64;
    std::uint64_t seed = 42;
    std::string mode = "adaptive";
    double w = 1.0;
    double k = 1.6;
    double m = 0.2;
    std::size_t decode_steps = 16;
    bool visual_pruning = true;
    std::size_t system_len = 8;
    std::size_t instruction_len = 16;
    std::optional<std::string> input;  // SHRPVID1 file; overrides the synthetic pattern and n, f, d
    std::optional<std::string> output;
    DecoderConfig decoder;

    /// Throws ConfigError for any out-of-range or unknown setting.
    void validate() const;
    SharpVConfig sharpv() const;
    DecoderConfig decoder_for(std::size_t visual_dim) const;
    SyntheticVideoSpec video_spec() const;
};

/// Overlays the keys present in `j` onto `config`. Unknown keys and wrong types raise ConfigError.
void apply_json(HarnessConfig& config, const nlohmann::json& j);

/// Loads the video (file or synthetic), builds the decoder and prompt, runs the pipeline.
PipelineOutput run_harness(const HarnessConfig& config);

/// Report document. Wall-clock values live only under "timing".
nlohmann::json report_to_json(const PipelineOutput& output, const HarnessConfig& config);

struct BenchConfig {
    std::size_t n = 16;
    std::size_t f = 64;
    std::size_t d = 64;
    std::size_t repetitions = 21;
    std::vector<std::size_t> ladder = {1, 2, 4};
    std::size_t cache_base_len = 64;
    std::uint64_t seed = 42;
    DecoderConfig decoder;

    void validate() const;
};

struct CachePoint {
    std::size_t retained_len;
    std::size_t bytes;
};

struct BenchResult {
    std::vector<ScalingPoint> token_scaling;  // n scaled by the ladder
    std::vector<ScalingPoint> dim_scaling;    // d scaled by the ladder
    std::vector<CachePoint> cache_scaling;    // prefilled cache bytes per retained length
};

BenchResult run_bench(const BenchConfig& config);
nlohmann::json bench_to_json(const BenchResult& result, const BenchConfig& config);

}  // namespace sharpv
