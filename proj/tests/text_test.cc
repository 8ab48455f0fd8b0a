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

#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "riskgate/sha256.h"

namespace riskgate {
namespace {

TEST(TextTest, NfcComposesCombiningSequences) {
  EXPECT_EQ(text::ToNfc("e\xCC\x81"), "\xC3\xA9");  // e + U+0301 -> U+00E9
  EXPECT_EQ(text::ToNfc("plain"), "plain");
}

TEST(TextTest, FoldIsCaseInsensitive) {
  EXPECT_EQ(text::Fold("IGNORE Security"), "ignore security");
  EXPECT_EQ(text::Fold("Stra\xC3\x9F" "e"), "strasse");  // full folding of U+00DF
}

TEST(TextTest, TokenizeStripsEdgePunctuation) {
  const auto tokens = text::Tokenize("  Hello, world!  (again) ... ");
  ASSERT_EQ(tokens.size(), 3u);
  EXPECT_EQ(tokens[0].folded, "hello");
  EXPECT_EQ(tokens[1].folded, "world");
  EXPECT_EQ(tokens[2].folded, "again");
  EXPECT_EQ(tokens[0].begin, 2u);
  EXPECT_EQ(tokens[0].end, 7u);
}

TEST(TextTest, TokenizeEmptyAndWhitespace) {
  EXPECT_TRUE(text::Tokenize("").empty());
  EXPECT_TRUE(text::Tokenize(" \t\n ").empty());
}

TEST(TextTest, Utf8Validation) {
  EXPECT_TRUE(text::IsValidUtf8("h\xC3\xA9llo \xF0\x9F\x98\x80"));
  EXPECT_FALSE(text::IsValidUtf8("\xC3"));
  EXPECT_FALSE(text::IsValidUtf8("\xED\xA0\x80"));  // surrogate
  EXPECT_FALSE(text::IsValidUtf8("\xC0\xAF"));      // overlong
}

TEST(TextTest, DecodeKeepsInvalidBytesAsSingleUnits) {
  const auto units = text::DecodeUtf8("a\xFF" "b");
  ASSERT_EQ(units.size(), 3u);
  EXPECT_TRUE(units[0].valid);
  EXPECT_FALSE(units[1].valid);
  EXPECT_EQ(units[1].length, 1u);
  EXPECT_EQ(units[2].scalar, U'b');
}

TEST(TextTest, AppendUtf8RoundTrips) {
  std::string s;
  for (char32_t c : {U'a', U'\u00E9', U'\u200B', U'\U0001F600'}) text::AppendUtf8(s, c);
  const auto units = text::DecodeUtf8(s);
  ASSERT_EQ(units.size(), 4u);
  EXPECT_EQ(units[3].scalar, U'\U0001F600');
}

TEST(Sha256Test, KnownDigests) {
  EXPECT_EQ(DigestHex(Sha256("")),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(DigestHex(Sha256("abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Sha256Test, PartsConcatenate) {
  const std::string_view parts[] = {"ab", "c"};
  EXPECT_EQ(Sha256(parts), Sha256("abc"));
}

TEST(Sha256Test, HexRoundTrip) {
  const Digest d = Sha256("riskgate");
  EXPECT_EQ(DigestFromHex(DigestHex(d)), d);
  EXPECT_THROW(DigestFromHex("abc"), std::invalid_argument);
  EXPECT_THROW(DigestFromHex(std::string(64, 'g')), std::invalid_argument);
}

}  // namespace
}  // namespace riskgate
