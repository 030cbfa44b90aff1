// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The stfact Authors

#include "stfact/cache.hpp"

#include <filesystem>
#include <json.hpp>

#include "stfact/digest.hpp"
#include "stfact/error.hpp"

namespace stfact {

std::string cache_key(std::string_view request_kind, std::span<const std::uint8_t> payload_digest,
                      std::string_view model_id) {
  std::string buf;
  append_length_prefixed(buf, request_kind);
  append_length_prefixed(buf, model_id);
  append_length_prefixed(
      buf, std::string_view(reinterpret_cast<const char*>(payload_digest.data()), payload_digest.size()));
  return std::string(request_kind) + ":" + sha256_hex(buf);
}

std::shared_ptr<ResponseCache> ResponseCache::open(const std::string& path) {
  if (path.empty()) return in_memory();
  static std::mutex registry_mutex;
  static std::unordered_map<std::string, std::weak_ptr<ResponseCache>> registry;

  std::error_code ec;
  std::string canonical = std::filesystem::weakly_canonical(path, ec).string();
  if (ec || canonical.empty()) canonical = path;

  std::lock_guard lock(registry_mutex);
  if (auto it = registry.find(canonical); it != registry.end()) {
    if (auto existing = it->second.lock()) return existing;
  }
  auto cache = std::make_shared<ResponseCache>(path);
  registry[canonical] = cache;
  return cache;
}

std::shared_ptr<ResponseCache> ResponseCache::in_memory() {
  return std::make_shared<ResponseCache>(std::string());
}

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  const auto parent = std::filesystem::path(path_).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  load_file();
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_) throw Error(ErrorKind::kConfig, "cannot open cache file " + path_);
}

void ResponseCache::load_file() {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    // A torn final line after a crash is skipped; every complete line is valid.
    auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!j.is_object() || !j.contains("k") || !j.contains("v") || !j["k"].is_string() ||
        !j["v"].is_string()) {
      continue;
    }
    entries_[j["k"].get<std::string>()] = j["v"].get<std::string>();
  }
}

std::optional<std::string> ResponseCache::load(const std::string& key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  hits_.fetch_add(1, std::memory_order_relaxed);
  return it->second;
}

void ResponseCache::store(const std::string& key, const std::string& value) {
  std::unique_lock lock(mutex_);
  entries_.insert_or_assign(key, value);
  if (out_.is_open()) {
    nlohmann::json rec = {{"k", key}, {"v", value}};
    out_ << rec.dump() << '\n';
    out_.flush();
  }
}

std::size_t ResponseCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::uint64_t ResponseCache::hits() const { return hits_.load(std::memory_order_relaxed); }

}  // namespace stfact
