#pragma once

#include <stdexcept>
#include <string>

namespace bellgen {

// Base class for all library errors. The CLI maps these to exit code 2
// (data/protocol error) as opposed to usage errors (exit 1).
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Angle/config file could not be parsed.
class config_error : public error {
public:
    using error::error;
};

// A measure whose setting-pair mass deviates from 1/4 beyond tolerance.
class degenerate_measure_error : public error {
public:
    using error::error;
};

// A six-vector whose zero pattern contradicts its setting selectors.
class malformed_vector_error : public error {
public:
    using error::error;
};

// An empty setting-pair block where estimation requires at least one record.
class insufficient_data_error : public error {
public:
    using error::error;
};

// A randomness test invoked with too few bits or bad parameters.
class insufficient_bits_error : public error {
public:
    using error::error;
};

// Malformed serialized record (CSV/JSONL/binary frame).
class format_error : public error {
public:
    using error::error;
};

// Session protocol violation: bad frame, type mismatch, or sequence gap.
class protocol_error : public error {
public:
    using error::error;
};

// Transport failure on a channel (send/recv on a closed or broken stream).
class channel_error : public error {
public:
    using error::error;
};

} // namespace bellgen
