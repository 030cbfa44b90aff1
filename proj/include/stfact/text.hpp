// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stfact::text {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline char to_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

// Runs of whitespace become one space; leading/trailing whitespace removed.
std::string collapse_whitespace(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

bool starts_with_ci(std::string_view s, std::string_view prefix);

// Splits on any whitespace; no empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

// Single pass over `tpl`: each "{name}" with a known name is replaced by its
// value; substituted text is never re-scanned, unknown braces stay verbatim.
std::string fill_template(std::string_view tpl,
                          const std::vector<std::pair<std::string_view, std::string_view>>& values);

std::string excerpt(std::string_view s, std::size_t max_len = 200);

}  // namespace stfact::text
