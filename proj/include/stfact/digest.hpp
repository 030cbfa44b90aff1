// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace stfact {

using Sha256 = std::array<std::uint8_t, 32>;

Sha256 sha256(std::string_view bytes);
std::string to_hex(std::span<const std::uint8_t> bytes);
inline std::string sha256_hex(std::string_view bytes) { return to_hex(sha256(bytes)); }

// Appends an 8-byte little-endian length then the bytes, so concatenated
// fields hash without ambiguity.
void append_length_prefixed(std::string& out, std::string_view field);

}  // namespace stfact
