// Copyright 2026 The Gramtrie Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gramtrie::utf8 {

/* Decodes a UTF-8 string into code points. Throws InvalidInputError on
 * malformed input (bad lead byte, truncated sequence, overlong form,
 * surrogate, or out-of-range scalar). */
std::vector<char32_t> decode(std::string_view text);

/* Appends the UTF-8 encoding of one code point to out. */
void append(char32_t cp, std::string& out);

/* Encodes a code point sequence as UTF-8. */
std::string encode(const std::vector<char32_t>& cps);

}  // namespace gramtrie::utf8
