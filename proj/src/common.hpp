// SPDX-License-Identifier: Apache-2.0
//
// bodyauth -- on-/off-body device authentication from RSS traces
// Copyright (c) 2026 bodyauth developers

#pragma once

#include <stdexcept>
#include <string>

namespace bodyauth {

// Error classes shared by the whole library. The C API and the CLI map
// these 1:1 onto status / exit codes, so keep the set stable.
enum class Errc {
    invalid_argument = 1,
    io = 2,
    parse = 3,
    too_short = 4,
    format_version = 5,
    corrupt = 6,
    state = 7,
    numeric = 8,
    unsupported = 9,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool ok, Errc code, const std::string& message) {
    if (!ok) fail(code, message);
}

}  // namespace bodyauth
