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

#include "riskgate/watermark.h"

#include <cctype>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "riskgate/text.h"

namespace riskgate::wm {

namespace {

int HexValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

bool IsZeroWidth(char32_t c) {
  return c == kZeroWidth[0] || c == kZeroWidth[1] || c == kZeroWidth[2];
}

WatermarkKey WatermarkKey::FromHex(std::string key_id, std::string_view hex) {
  if (key_id.empty()) throw std::invalid_argument("key id is empty");
  for (char c : key_id) {
    if (c == '=' || std::isspace(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("key id contains '=' or white space");
    }
  }
  if (hex.size() != 32) {
    throw std::invalid_argument("watermark key must be 32 hex digits (16 bytes)");
  }
  WatermarkKey key;
  key.key_id = std::move(key_id);
  for (std::size_t i = 0; i < 16; ++i) {
    const int hi = HexValue(hex[2 * i]);
    const int lo = HexValue(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("bad hex digit in key");
    key.bytes[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return key;
}

std::string WatermarkKey::hex() const {
  return text::ToHex(bytes.data(), bytes.size());
}

Digest Fingerprint(std::string_view text, const WatermarkKey& key,
                   FingerprintMode mode) {
  const std::string_view key_view(reinterpret_cast<const char*>(key.bytes.data()),
                                  key.bytes.size());
  if (mode == FingerprintMode::kConcat) {
    const std::string_view parts[] = {text, key_view};
    return Sha256(parts);
  }
  std::string mixed(text);
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    mixed[i] = static_cast<char>(static_cast<std::uint8_t>(mixed[i]) ^
                                 key.bytes[i % key.bytes.size()]);
  }
  return Sha256(mixed);
}

Embedded Embed(std::string_view text, const WatermarkKey& key,
               FingerprintMode mode) {
  if (!text::IsValidUtf8(text)) {
    throw std::invalid_argument("watermark input is not valid UTF-8");
  }
  std::vector<char32_t> scalars;
  std::string sanitized;
  sanitized.reserve(text.size());
  for (const text::CodeUnit& u : text::DecodeUtf8(text)) {
    if (IsZeroWidth(u.scalar)) continue;
    scalars.push_back(u.scalar);
    sanitized.append(text.substr(u.begin, u.length));
  }

  Embedded out;
  out.fingerprint = Fingerprint(sanitized, key, mode);
  out.text.reserve(sanitized.size() + 3 * (scalars.size() / kSchedulePeriod + 1));
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    if (i % kSchedulePeriod == 0) {
      text::AppendUtf8(out.text, kZeroWidth[(i / kSchedulePeriod) % kZeroWidth.size()]);
    }
    text::AppendUtf8(out.text, scalars[i]);
  }
  return out;
}

std::vector<ZwMark> Schedule(std::size_t length) {
  std::vector<ZwMark> marks;
  for (std::size_t i = 0; i < length; i += kSchedulePeriod) {
    marks.push_back({i, (i / kSchedulePeriod) % kZeroWidth.size()});
  }
  return marks;
}

Extracted Extract(std::string_view text) {
  Extracted out;
  out.clean.reserve(text.size());
  std::size_t visible = 0;
  for (const text::CodeUnit& u : text::DecodeUtf8(text)) {
    if (u.valid && IsZeroWidth(u.scalar)) {
      const std::size_t symbol = u.scalar == kZeroWidth[0]   ? 0
                                 : u.scalar == kZeroWidth[1] ? 1
                                                             : 2;
      out.pattern.push_back({visible, symbol});
      continue;
    }
    out.clean.append(text.substr(u.begin, u.length));
    ++visible;
  }

  const std::vector<ZwMark> expected = Schedule(visible);
  out.expected = expected.size();
  // A schedule slot survives if a mark with the right symbol sits at its
  // position; duplicates at one position count once.
  std::size_t p = 0;
  for (const ZwMark& want : expected) {
    while (p < out.pattern.size() && out.pattern[p].position < want.position) ++p;
    for (std::size_t q = p;
         q < out.pattern.size() && out.pattern[q].position == want.position; ++q) {
      if (out.pattern[q].symbol == want.symbol) {
        ++out.matched;
        break;
      }
    }
  }
  out.match_ratio = expected.empty()
                        ? (out.pattern.empty() ? 1.0 : 0.0)
                        : static_cast<double>(out.matched) /
                              static_cast<double>(expected.size());
  out.valid = out.pattern == expected;
  return out;
}

std::string WatermarkRecord::ToJson() const {
  nlohmann::ordered_json j;
  j["fingerprint"] = DigestHex(fingerprint);
  j["key_id"] = key_id;
  j["client_id"] = request.client_id;
  j["ts"] = request.timestamp;
  j["route"] = request.route;
  j["text_length"] = text_length;
  return j.dump();
}

WatermarkRecord WatermarkRecord::FromJson(std::string_view line) {
  const nlohmann::json j = nlohmann::json::parse(line);
  WatermarkRecord r;
  r.fingerprint = DigestFromHex(j.at("fingerprint").get<std::string>());
  r.key_id = j.at("key_id").get<std::string>();
  r.request.client_id = j.value("client_id", std::string());
  r.request.timestamp = j.value("ts", 0.0);
  r.request.route = j.value("route", std::string());
  r.text_length = j.value("text_length", std::size_t{0});
  return r;
}

KeyStore KeyStore::Parse(std::string_view text) {
  KeyStore store;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("key store line " + std::to_string(line_no) +
                                  ": expected key_id=hex");
    }
    try {
      store.Add(WatermarkKey::FromHex(std::string(Trim(line.substr(0, eq))),
                                      Trim(line.substr(eq + 1))));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("key store line " + std::to_string(line_no) +
                                  ": " + e.what());
    }
  }
  return store;
}

KeyStore KeyStore::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open key store " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

void KeyStore::Add(const WatermarkKey& key,
                   const std::optional<std::filesystem::path>& path) {
  if (Find(key.key_id) != nullptr) {
    throw std::invalid_argument("duplicate key id " + key.key_id);
  }
  if (path) {
    std::ofstream out(*path, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to " + path->string());
    out << key.key_id << '=' << key.hex() << '\n';
  }
  keys_.push_back(key);
}

const WatermarkKey* KeyStore::Find(std::string_view key_id) const {
  for (const WatermarkKey& k : keys_) {
    if (k.key_id == key_id) return &k;
  }
  return nullptr;
}

const WatermarkKey& KeyStore::Active() const {
  if (keys_.empty()) throw std::out_of_range("key store is empty");
  return keys_.back();
}

TraceIndex::TraceIndex(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  std::string line;
  int line_no = 0;
  while (in && std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    WatermarkRecord r;
    try {
      r = WatermarkRecord::FromJson(line);
    } catch (const std::exception& e) {
      throw std::invalid_argument("trace index line " + std::to_string(line_no) +
                                  ": " + e.what());
    }
    by_fingerprint_.emplace(DigestHex(r.fingerprint), std::move(r));
    ++size_;
  }
}

void TraceIndex::Insert(const WatermarkRecord& record) {
  std::unique_lock<std::shared_mutex> lock(mu_);
  if (path_) {
    std::ofstream out(*path_, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to " + path_->string());
    out << record.ToJson() << '\n';
  }
  by_fingerprint_.emplace(DigestHex(record.fingerprint), record);
  ++size_;
}

std::vector<WatermarkRecord> TraceIndex::Trace(const Digest& fingerprint) const {
  std::shared_lock<std::shared_mutex> lock(mu_);
  std::vector<WatermarkRecord> out;
  auto [lo, hi] = by_fingerprint_.equal_range(DigestHex(fingerprint));
  for (auto it = lo; it != hi; ++it) out.push_back(it->second);
  return out;
}

std::size_t TraceIndex::size() const {
  std::shared_lock<std::shared_mutex> lock(mu_);
  return size_;
}

}  // namespace riskgate::wm
