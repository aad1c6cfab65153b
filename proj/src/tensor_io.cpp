// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sharpv/tensor_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "sharpv/error.hpp"

namespace sharpv {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    const std::array<char, 4> bytes = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                       static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out.write(bytes.data(), bytes.size());
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > UINT32_MAX) {
        throw TensorIoError(TensorIoErrc::dimension_overflow, std::string(what) + " does not fit in u32");
    }
    return static_cast<std::uint32_t>(v);
}

}  // namespace

std::string_view to_string(TensorIoErrc code) {
    switch (code) {
        case TensorIoErrc::io_failure:
            return "io_failure";
        case TensorIoErrc::bad_magic:
            return "bad_magic";
        case TensorIoErrc::truncated:
            return "truncated";
        case TensorIoErrc::dimension_overflow:
            return "dimension_overflow";
        case TensorIoErrc::invalid_dimensions:
            return "invalid_dimensions";
        case TensorIoErrc::non_finite:
            return "non_finite";
        case TensorIoErrc::trailing_data:
            return "trailing_data";
    }
    return "unknown";
}

void write_tensor(std::ostream& out, const VideoTokens& video) {
    out.write(kTensorMagic.data(), static_cast<std::streamsize>(kTensorMagic.size()));
    put_u32(out, checked_u32(video.frames(), "n"));
    put_u32(out, checked_u32(video.tokens_per_frame(), "f"));
    put_u32(out, checked_u32(video.dim(), "d"));

    std::vector<char> payload;
    payload.reserve(video.data().values().size() * 4);
    for (double x : video.data().values()) {
        const auto narrowed = static_cast<float>(x);
        if (!std::isfinite(narrowed)) {
            throw TensorIoError(TensorIoErrc::non_finite, "value overflows float32");
        }
        const auto bits = std::bit_cast<std::uint32_t>(narrowed);
        for (int shift = 0; shift < 32; shift += 8) {
            payload.push_back(static_cast<char>((bits >> shift) & 0xFF));
        }
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) {
        throw TensorIoError(TensorIoErrc::io_failure, "write failed");
    }
}

void write_tensor_file(const std::filesystem::path& path, const VideoTokens& video) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw TensorIoError(TensorIoErrc::io_failure, "cannot open " + path.string() + " for writing");
    }
    write_tensor(out, video);
    out.flush();
    if (!out) {
        throw TensorIoError(TensorIoErrc::io_failure, "write to " + path.string() + " failed");
    }
}

VideoTokens read_tensor(std::istream& in) {
    std::array<unsigned char, kTensorHeaderBytes> header{};
    in.read(reinterpret_cast<char*>(header.data()), static_cast<std::streamsize>(header.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    if (got >= kTensorMagic.size() &&
        std::string_view(reinterpret_cast<const char*>(header.data()), kTensorMagic.size()) != kTensorMagic) {
        throw TensorIoError(TensorIoErrc::bad_magic, "not a SHRPVID1 tensor");
    }
    if (got < header.size()) {
        throw TensorIoError(TensorIoErrc::truncated,
                            "header has " + std::to_string(got) + " of " + std::to_string(header.size()) + " bytes");
    }

    const std::uint64_t n = get_u32(header.data() + 8);
    const std::uint64_t f = get_u32(header.data() + 12);
    const std::uint64_t d = get_u32(header.data() + 16);
    if (n == 0 || f == 0 || d == 0) {
        throw TensorIoError(TensorIoErrc::invalid_dimensions, "n, f and d must be >= 1");
    }
    // Each factor is < 2^32, so n*f fits in u64; guard the second product.
    const std::uint64_t nf = n * f;
    if (nf > kMaxTensorElements || d > kMaxTensorElements / nf) {
        throw TensorIoError(TensorIoErrc::dimension_overflow,
                            std::to_string(n) + "x" + std::to_string(f) + "x" + std::to_string(d) + " is too large");
    }
    const std::uint64_t count = nf * d;

    // Read in bounded chunks so a lying header cannot force a huge allocation up front.
    constexpr std::size_t kChunkElements = std::size_t{1} << 16;
    std::vector<double> values;
    std::vector<unsigned char> chunk;
    std::uint64_t remaining = count;
    while (remaining > 0) {
        const auto take = static_cast<std::size_t>(std::min<std::uint64_t>(remaining, kChunkElements));
        chunk.resize(take * 4);
        in.read(reinterpret_cast<char*>(chunk.data()), static_cast<std::streamsize>(chunk.size()));
        if (static_cast<std::size_t>(in.gcount()) != chunk.size()) {
            throw TensorIoError(TensorIoErrc::truncated, "payload ends after " +
                                                             std::to_string(values.size() * 4 + static_cast<std::size_t>(in.gcount())) +
                                                             " of " + std::to_string(count * 4) + " bytes");
        }
        for (std::size_t i = 0; i < take; ++i) {
            const float x = std::bit_cast<float>(get_u32(chunk.data() + i * 4));
            if (!std::isfinite(x)) {
                throw TensorIoError(TensorIoErrc::non_finite, "payload element " + std::to_string(values.size()));
            }
            values.push_back(static_cast<double>(x));
        }
        remaining -= take;
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw TensorIoError(TensorIoErrc::trailing_data, "bytes follow the declared payload");
    }

    return VideoTokens(static_cast<std::size_t>(n), static_cast<std::size_t>(f),
                       Mat(static_cast<std::size_t>(nf), static_cast<std::size_t>(d), std::move(values)));
}

VideoTokens read_tensor_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw TensorIoError(TensorIoErrc::io_failure, "cannot open " + path.string());
    }
    return read_tensor(in);
}

}  // namespace sharpv
