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

#ifndef RISKGATE_SHA256_H_
#define RISKGATE_SHA256_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace riskgate {

using Digest = std::array<std::uint8_t, 32>;

// SHA-256 over the concatenation of `parts`.
Digest Sha256(std::span<const std::string_view> parts);
Digest Sha256(std::string_view data);

std::string DigestHex(const Digest& digest);
// Throws std::invalid_argument unless `hex` is 64 hex digits.
Digest DigestFromHex(std::string_view hex);

}  // namespace riskgate

#endif  // RISKGATE_SHA256_H_
