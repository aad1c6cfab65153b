// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sharpv {

/// Norms below this are treated as zero; such vectors normalize to the zero vector.
inline constexpr double kNormEpsilon = 1e-12;

/// Dense real vector. Entries are finite; construction rejects NaN/Inf.
class Vec {
public:
    Vec() = default;
    explicit Vec(std::vector<double> values);
    static Vec zeros(std::size_t dim);

    std::size_t size() const { return m_values.size(); }
    double operator[](std::size_t i) const { return m_values[i]; }
    std::span<const double> span() const { return m_values; }
    operator std::span<const double>() const { return m_values; }  // NOLINT(google-explicit-constructor)
    const std::vector<double>& values() const { return m_values; }

    auto begin() const { return m_values.begin(); }
    auto end() const { return m_values.end(); }

    bool operator==(const Vec&) const = default;

private:
    std::vector<double> m_values;
};

/// Non-owning row-major matrix view.
struct MatView {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::span<const double> values;

    std::span<const double> row(std::size_t i) const { return values.subspan(i * cols, cols); }
    MatView row_block(std::size_t first, std::size_t count) const {
        return {count, cols, values.subspan(first * cols, count * cols)};
    }
};

/// Dense row-major matrix with finite entries.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols);  // zero-filled
    Mat(std::size_t rows, std::size_t cols, std::vector<double> values);
    static Mat from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return m_rows; }
    std::size_t cols() const { return m_cols; }
    std::span<const double> row(std::size_t i) const { return view().row(i); }
    double at(std::size_t r, std::size_t c) const { return m_values[r * m_cols + c]; }
    const std::vector<double>& values() const { return m_values; }

    MatView view() const { return {m_rows, m_cols, m_values}; }
    operator MatView() const { return view(); }  // NOLINT(google-explicit-constructor)

    bool operator==(const Mat&) const = default;

private:
    std::size_t m_rows = 0;
    std::size_t m_cols = 0;
    std::vector<double> m_values;
};

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> v);

/// v / |v|, or the zero vector when |v| < kNormEpsilon.
Vec l2_normalize(std::span<const double> v);

/// Euclidean distance between the unit directions of a and b, in [0, 2].
/// Computed as |a^ - b^| rather than sqrt(2 - 2 cos) so rounding can never produce a negative radicand.
double dissim(std::span<const double> a, std::span<const double> b);

/// Cosine of the angle between a and b; 0 when either is (numerically) zero.
double cosine_sim(std::span<const double> a, std::span<const double> b);

/// dissim(row_i(m), ref) for every row.
Vec row_dissim(MatView m, std::span<const double> ref);

/// dissim(row_i(a), row_i(b)) for every row.
Vec paired_row_dissim(MatView a, MatView b);

/// Arithmetic mean over rows. Throws ShapeError on an empty matrix.
Vec mean_rows(MatView m);

}  // namespace sharpv
