// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace rdrec {

// FNV-1a, 64-bit. Used for response-cache keys, mock-backend word picks,
// and input-content fingerprints in run manifests.
inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view s);

// CRC-32 (IEEE 802.3 polynomial, reflected), matching zlib's crc32.
uint32_t crc32(const void* data, size_t len, uint32_t seed = 0);

// FNV fingerprint of a file's contents, "fnv1a64:<hex>"; throws on I/O error.
std::string file_fingerprint(const std::string& path);

} // namespace rdrec
