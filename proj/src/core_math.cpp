// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#include "sharpv/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sharpv/error.hpp"

namespace sharpv {

namespace {

// Reductions accumulate in long double (80-bit extended on x86-64).
using Accum = long double;

void require_finite(std::span<const double> values, const char* what) {
    for (double x : values) {
        if (!std::isfinite(x)) {
            throw ValueError(std::string(what) + ": non-finite entry");
        }
    }
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw ShapeError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
    }
}

Accum norm_accum(std::span<const double> v) {
    Accum s = 0;
    for (double x : v) {
        s += static_cast<Accum>(x) * x;
    }
    return std::sqrt(s);
}

// 1/|v|, or 0 for a numerically zero vector (so the normalized vector is zero).
Accum inverse_norm(std::span<const double> v) {
    const Accum n = norm_accum(v);
    return n < kNormEpsilon ? Accum{0} : Accum{1} / n;
}

double unit_distance(std::span<const double> a, Accum inv_a, std::span<const double> b, Accum inv_b) {
    Accum s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Accum diff = a[i] * inv_a - b[i] * inv_b;
        s += diff * diff;
    }
    return std::min(2.0, static_cast<double>(std::sqrt(s)));
}

}  // namespace

Vec::Vec(std::vector<double> values) : m_values(std::move(values)) {
    require_finite(m_values, "Vec");
}

Vec Vec::zeros(std::size_t dim) {
    return Vec(std::vector<double>(dim, 0.0));
}

Mat::Mat(std::size_t rows, std::size_t cols) : m_rows(rows), m_cols(cols), m_values(rows * cols, 0.0) {}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> values)
    : m_rows(rows),
      m_cols(cols),
      m_values(std::move(values)) {
    if (m_values.size() != rows * cols) {
        throw ShapeError("Mat: " + std::to_string(rows) + "x" + std::to_string(cols) + " needs " +
                         std::to_string(rows * cols) + " values, got " + std::to_string(m_values.size()));
    }
    require_finite(m_values, "Mat");
}

Mat Mat::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        return {};
    }
    const std::size_t cols = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        require_same_dim(r.size(), cols, "Mat::from_rows");
        values.insert(values.end(), r.begin(), r.end());
    }
    return Mat(rows.size(), cols, std::move(values));
}

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_dim(a.size(), b.size(), "dot");
    Accum s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += static_cast<Accum>(a[i]) * b[i];
    }
    return static_cast<double>(s);
}

double l2_norm(std::span<const double> v) {
    return static_cast<double>(norm_accum(v));
}

Vec l2_normalize(std::span<const double> v) {
    const Accum inv = inverse_norm(v);
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = static_cast<double>(v[i] * inv);
    }
    return Vec(std::move(out));
}

double dissim(std::span<const double> a, std::span<const double> b) {
    require_same_dim(a.size(), b.size(), "dissim");
    return unit_distance(a, inverse_norm(a), b, inverse_norm(b));
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
    require_same_dim(a.size(), b.size(), "cosine_sim");
    const Accum inv_a = inverse_norm(a);
    const Accum inv_b = inverse_norm(b);
    if (inv_a == 0 || inv_b == 0) {
        return 0.0;
    }
    Accum s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] * inv_a) * (b[i] * inv_b);
    }
    return std::clamp(static_cast<double>(s), -1.0, 1.0);
}

Vec row_dissim(MatView m, std::span<const double> ref) {
    require_same_dim(m.cols, ref.size(), "row_dissim");
    const Accum inv_ref = inverse_norm(ref);
    std::vector<double> out(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const auto r = m.row(i);
        out[i] = unit_distance(r, inverse_norm(r), ref, inv_ref);
    }
    return Vec(std::move(out));
}

Vec paired_row_dissim(MatView a, MatView b) {
    if (a.rows != b.rows || a.cols != b.cols) {
        throw ShapeError("paired_row_dissim: shape mismatch");
    }
    std::vector<double> out(a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const auto ra = a.row(i);
        const auto rb = b.row(i);
        out[i] = unit_distance(ra, inverse_norm(ra), rb, inverse_norm(rb));
    }
    return Vec(std::move(out));
}

Vec mean_rows(MatView m) {
    if (m.rows == 0) {
        throw ShapeError("mean_rows: empty matrix");
    }
    std::vector<Accum> sum(m.cols, 0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols; ++j) {
            sum[j] += r[j];
        }
    }
    std::vector<double> out(m.cols);
    for (std::size_t j = 0; j < m.cols; ++j) {
        out[j] = static_cast<double>(sum[j] / static_cast<Accum>(m.rows));
    }
    return Vec(std::move(out));
}

}  // namespace sharpv
