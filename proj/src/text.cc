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

#include "riskgate/text.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace riskgate::text {

std::vector<CodeUnit> DecodeUtf8(std::string_view utf8) {
  std::vector<CodeUnit> units;
  units.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const int32_t length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) {
      // U8_NEXT may skip several bytes of a truncated sequence; keep byte
      // granularity so that the original bytes survive a round trip.
      i = start + 1;
      units.push_back({static_cast<char32_t>(s[start]),
                       static_cast<std::size_t>(start), 1, false});
      continue;
    }
    units.push_back({static_cast<char32_t>(c), static_cast<std::size_t>(start),
                     static_cast<std::size_t>(i - start), true});
  }
  return units;
}

bool IsValidUtf8(std::string_view utf8) {
  for (const CodeUnit& u : DecodeUtf8(utf8)) {
    if (!u.valid) return false;
  }
  return true;
}

void AppendUtf8(std::string& out, char32_t scalar) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(scalar), error);
  if (error) throw std::invalid_argument("not a Unicode scalar value");
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

namespace {

const icu::Normalizer2& Nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || nfc == nullptr) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  return *nfc;
}

icu::UnicodeString NormalizeNfc(std::string_view utf8) {
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = Nfc().normalize(in, status);
  if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
  return out;
}

bool IsPunct(char32_t c) {
  return u_ispunct(static_cast<UChar32>(c)) != 0;
}

bool IsSpace(char32_t c) {
  return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0;
}

}  // namespace

std::string ToNfc(std::string_view utf8) {
  std::string out;
  NormalizeNfc(utf8).toUTF8String(out);
  return out;
}

std::string Fold(std::string_view utf8) {
  icu::UnicodeString s = NormalizeNfc(utf8);
  s.foldCase(U_FOLD_CASE_DEFAULT);
  std::string out;
  s.toUTF8String(out);
  return out;
}

std::vector<Token> Tokenize(std::string_view utf8) {
  std::vector<Token> tokens;
  const std::vector<CodeUnit> units = DecodeUtf8(utf8);
  std::size_t i = 0;
  while (i < units.size()) {
    while (i < units.size() && units[i].valid && IsSpace(units[i].scalar)) ++i;
    std::size_t first = i;
    while (i < units.size() && !(units[i].valid && IsSpace(units[i].scalar))) {
      ++i;
    }
    std::size_t last = i;  // exclusive
    while (first < last && units[first].valid && IsPunct(units[first].scalar)) {
      ++first;
    }
    while (last > first && units[last - 1].valid &&
           IsPunct(units[last - 1].scalar)) {
      --last;
    }
    if (first == last) continue;
    const std::size_t begin = units[first].begin;
    const std::size_t end = units[last - 1].begin + units[last - 1].length;
    tokens.push_back({Fold(utf8.substr(begin, end - begin)), begin, end});
  }
  return tokens;
}

std::string ToHex(const unsigned char* data, std::size_t size) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(size * 2);
  for (std::size_t i = 0; i < size; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0xF]);
  }
  return out;
}

}  // namespace riskgate::text
