// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sharpv {

/// Seeded standard-normal source with a fully specified algorithm, so that weights and
/// synthetic videos do not depend on the standard library's distribution implementations.
///
/// Engine: std::mt19937_64 (output sequence fixed by the standard).
/// Uniforms: u = ((x >> 11) + 0.5) * 2^-53, strictly inside (0, 1).
/// Normals: Box-Muller pairs, z0 = r cos(2 pi u2), z1 = r sin(2 pi u2), r = sqrt(-2 ln u1);
/// z0 is returned first, z1 is cached for the next call.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : m_engine(seed) {}

    double uniform() {
        return (static_cast<double>(m_engine() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (m_has_spare) {
            m_has_spare = false;
            return m_spare;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        m_spare = r * std::sin(phi);
        m_has_spare = true;
        return r * std::cos(phi);
    }

    std::uint64_t next_u64() { return m_engine(); }

private:
    std::mt19937_64 m_engine;
    double m_spare = 0.0;
    bool m_has_spare = false;
};

}  // namespace sharpv
