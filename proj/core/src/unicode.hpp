// Copyright 2026 The SGSM Authors
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

#include <cstddef>
#include <string>
#include <string_view>

// UTF-8 helpers backed by generated Unicode 13 tables. Invalid byte sequences
// decode as U+FFFD one byte at a time, so every input is processed.
namespace sgsm::unicode {

bool is_punctuation(char32_t cp) noexcept;
bool is_whitespace(char32_t cp) noexcept;

/// Decodes one code point starting at `pos` and advances `pos`.
char32_t decode(std::string_view text, std::size_t& pos) noexcept;
void append_utf8(std::string& out, char32_t cp);
/// Appends the lowercase form of `cp` (one to three code points).
void append_lower(std::string& out, char32_t cp);

}  // namespace sgsm::unicode
