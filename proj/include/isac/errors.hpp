// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace isac {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent user input. Maps to CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Coincident points or zero-length propagation legs.
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

class InvalidCarrier : public Error {
public:
    using Error::Error;
};

/// A channel with no power where a power ratio is required.
class DegenerateChannel : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// An internal model invariant failed during validation.
class ModelError : public Error {
public:
    using Error::Error;
};

} // namespace isac
