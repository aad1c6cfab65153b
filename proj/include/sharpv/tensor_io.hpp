// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "sharpv/error.hpp"
#include "sharpv/visual_pruner.hpp"

namespace sharpv {

// SHRPVID1 layout, all little-endian:
//   bytes 0..7   magic "SHRPVID1"
//   bytes 8..19  u32 n, u32 f, u32 d
//   then n*f*d IEEE-754 binary32 values, frame-major (frame, token, dim).
inline constexpr std::string_view kTensorMagic = "SHRPVID1";
inline constexpr std::size_t kTensorHeaderBytes = 20;
/// Largest payload accepted when reading, in elements.
inline constexpr std::uint64_t kMaxTensorElements = std::uint64_t{1} << 32;

enum class TensorIoErrc : std::uint8_t {
    io_failure,          // open/read/write failed
    bad_magic,           // first 8 bytes are not "SHRPVID1"
    truncated,           // header or payload shorter than declared
    dimension_overflow,  // n*f*d overflows or exceeds kMaxTensorElements
    invalid_dimensions,  // some of n, f, d is zero
    non_finite,          // payload holds NaN or Inf
    trailing_data,       // bytes after the declared payload
};

std::string_view to_string(TensorIoErrc code);

class TensorIoError : public IoError {
public:
    TensorIoError(TensorIoErrc code, const std::string& message)
        : IoError(std::string(to_string(code)) + ": " + message),
          m_code(code) {}

    TensorIoErrc code() const { return m_code; }

private:
    TensorIoErrc m_code;
};

/// Values are narrowed to float32; videos from gen_synthetic_video are already on that grid.
void write_tensor(std::ostream& out, const VideoTokens& video);
void write_tensor_file(const std::filesystem::path& path, const VideoTokens& video);

VideoTokens read_tensor(std::istream& in);
VideoTokens read_tensor_file(const std::filesystem::path& path);

}  // namespace sharpv
