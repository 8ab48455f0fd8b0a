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

#ifndef RISKGATE_TEXT_H_
#define RISKGATE_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace riskgate::text {

// A token of the input, with byte offsets into the (NFC-normalized) text it
// was cut from. `folded` is the NFC + case-folded form used for matching.
struct Token {
  std::string folded;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// One decoded unit of a UTF-8 string. Invalid byte sequences decode as a
// single byte with `valid == false` so that callers can round-trip them.
struct CodeUnit {
  char32_t scalar = 0;
  std::size_t begin = 0;
  std::size_t length = 0;
  bool valid = true;
};

// Decodes leniently; never throws.
std::vector<CodeUnit> DecodeUtf8(std::string_view utf8);

bool IsValidUtf8(std::string_view utf8);

void AppendUtf8(std::string& out, char32_t scalar);

std::string ToNfc(std::string_view utf8);

// NFC followed by full Unicode case folding.
std::string Fold(std::string_view utf8);

// Splits on Unicode white space, strips leading and trailing punctuation
// from each piece, and drops pieces that become empty. Offsets refer to
// `utf8` as given; callers wanting NFC offsets normalize first.
std::vector<Token> Tokenize(std::string_view utf8);

std::string ToHex(const unsigned char* data, std::size_t size);

}  // namespace riskgate::text

#endif  // RISKGATE_TEXT_H_
