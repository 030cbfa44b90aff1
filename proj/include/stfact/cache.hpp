// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

namespace stfact {

/// Key for one cached backend response. The request kind is kept as a
/// readable prefix so "judge", "nli" and "chat" entries never share key space;
/// the suffix hashes the model id together with the payload digest.
std::string cache_key(std::string_view request_kind, std::span<const std::uint8_t> payload_digest,
                      std::string_view model_id);

/// Content-addressed response store backed by an append-only JSONL file
/// (`{"k": key, "v": value}` per line). Concurrent readers, serialized writers.
/// An empty path gives a process-local in-memory cache.
class ResponseCache {
 public:
  /// One shared instance per path within a process, so several clients
  /// pointing at the same file never interleave partial lines.
  static std::shared_ptr<ResponseCache> open(const std::string& path);
  static std::shared_ptr<ResponseCache> in_memory();

  explicit ResponseCache(std::string path);

  ResponseCache(const ResponseCache&) = delete;
  ResponseCache& operator=(const ResponseCache&) = delete;

  std::optional<std::string> load(const std::string& key) const;
  void store(const std::string& key, const std::string& value);

  std::size_t size() const;
  std::uint64_t hits() const;
  const std::string& path() const { return path_; }

 private:
  void load_file();

  std::string path_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::string> entries_;
  std::ofstream out_;
  mutable std::atomic<std::uint64_t> hits_{0};
};

}  // namespace stfact
