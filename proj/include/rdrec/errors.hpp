// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace rdrec {

enum class Err {
    MissingFile,
    MalformedLine,
    EmptyInput,
    EmptyReview,
    Unparseable,
    BackendFailure,
    ConfigError,
    RangeError,
    OverlappingSpans,
    SeqOverflow,
    NonFinite,
    ChecksumMismatch,
    VersionMismatch,
    ConfigMismatch,
    InvalidArgument,
    IoError,
};

class RdrecError : public std::runtime_error {
public:
    RdrecError(Err code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}

    Err code() const { return code_; }

private:
    Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) {
    throw RdrecError(code, msg);
}

} // namespace rdrec
