// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sharpv {

/// Operand shapes disagree (dimension, row count, layer count).
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A value was rejected at construction (NaN/Inf entry, zero extent).
class ValueError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Bad user-facing configuration: out-of-range hyperparameters, unknown pattern names.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal invariant was found broken at runtime.
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace sharpv
