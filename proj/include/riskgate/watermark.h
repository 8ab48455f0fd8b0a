// Copyright 2026 The Riskgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Zero-width watermarking of generated text and a fingerprint index for
// tracing text back to the request that produced it.
//
// Embedding walks the scalar values of the text and, before every scalar
// whose index i is a multiple of 5, inserts kZeroWidth[(i / 5) % 3]. The
// schedule depends only on the visible text, so extraction can rebuild it
// and check what survived.

#ifndef RISKGATE_WATERMARK_H_
#define RISKGATE_WATERMARK_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "riskgate/sha256.h"

namespace riskgate::wm {

inline constexpr std::array<char32_t, 3> kZeroWidth = {U'\u200B', U'\u200C',
                                                      U'\u200D'};
inline constexpr std::size_t kSchedulePeriod = 5;

bool IsZeroWidth(char32_t c);

struct WatermarkKey {
  std::string key_id;
  std::array<std::uint8_t, 16> bytes{};

  // Throws std::invalid_argument unless `hex` is 32 hex digits and the id
  // is non-empty without '=' or whitespace.
  static WatermarkKey FromHex(std::string key_id, std::string_view hex);
  std::string hex() const;
};

enum class FingerprintMode {
  kConcat,  // SHA-256(text || key)
  kXor,     // SHA-256(text XOR key repeated to the text length)
};

Digest Fingerprint(std::string_view text, const WatermarkKey& key,
                   FingerprintMode mode = FingerprintMode::kConcat);

struct Embedded {
  std::string text;
  Digest fingerprint{};
};

// Pre-existing zero-width alphabet characters are removed first; the
// fingerprint covers that sanitized original. Throws std::invalid_argument
// on malformed UTF-8.
Embedded Embed(std::string_view text, const WatermarkKey& key,
               FingerprintMode mode = FingerprintMode::kConcat);

struct ZwMark {
  std::size_t position = 0;  // index of the visible scalar it precedes
  std::size_t symbol = 0;    // index into kZeroWidth

  friend bool operator==(const ZwMark&, const ZwMark&) = default;
};

// Marks expected for a visible text of `length` scalars.
std::vector<ZwMark> Schedule(std::size_t length);

struct Extracted {
  std::string clean;
  std::vector<ZwMark> pattern;
  bool valid = false;
  std::size_t expected = 0;  // schedule positions for the clean text
  std::size_t matched = 0;   // of those, how many carry the right mark
  double match_ratio = 0.0;  // matched / expected; 1 when nothing expected
};

// Never throws. Malformed bytes pass through to `clean` and count as one
// visible position each.
Extracted Extract(std::string_view text);

struct RequestMeta {
  std::string client_id;
  double timestamp = 0.0;  // seconds since the epoch
  std::string route;
};

struct WatermarkRecord {
  Digest fingerprint{};
  std::string key_id;
  RequestMeta request;
  std::size_t text_length = 0;  // visible scalars

  std::string ToJson() const;
  static WatermarkRecord FromJson(std::string_view line);
};

// key_id=hex32 lines. Rotation appends a new id; existing ids never change,
// so older fingerprints stay verifiable.
class KeyStore {
 public:
  KeyStore() = default;
  static KeyStore Parse(std::string_view text);
  static KeyStore LoadFile(const std::filesystem::path& path);

  // Throws std::invalid_argument if the id is already present. When `path`
  // is given the key is appended to that file as well.
  void Add(const WatermarkKey& key,
           const std::optional<std::filesystem::path>& path = std::nullopt);

  const WatermarkKey* Find(std::string_view key_id) const;
  // Most recently added key; throws std::out_of_range when empty.
  const WatermarkKey& Active() const;
  std::size_t size() const { return keys_.size(); }
  const std::vector<WatermarkKey>& keys() const { return keys_; }

 private:
  std::vector<WatermarkKey> keys_;
};

// Fingerprint -> records lookup. Many readers, one writer. If opened on a
// file, existing JSONL records are loaded and new ones appended.
class TraceIndex {
 public:
  TraceIndex() = default;
  explicit TraceIndex(std::filesystem::path path);

  void Insert(const WatermarkRecord& record);
  std::vector<WatermarkRecord> Trace(const Digest& fingerprint) const;
  std::size_t size() const;

 private:
  mutable std::shared_mutex mu_;
  std::unordered_multimap<std::string, WatermarkRecord> by_fingerprint_;
  std::optional<std::filesystem::path> path_;
  std::size_t size_ = 0;
};

}  // namespace riskgate::wm

#endif  // RISKGATE_WATERMARK_H_
