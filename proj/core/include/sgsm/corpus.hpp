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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sgsm::corpus {

enum class Mode { kProse, kPoetry };

Mode parse_mode(std::string_view text);
std::string_view to_string(Mode mode);

struct TextDocument {
  std::string doc_id;
  std::string title;
  std::string author;
  Mode mode = Mode::kProse;
  std::string raw;
};

struct Passage {
  std::string doc_id;
  std::size_t index = 0;
  std::string raw_span;
  std::vector<std::string> tokens;

  friend bool operator==(const Passage&, const Passage&) = default;
};

/// A pre-segmentation cleanup rule.
///
///  - line-prefix: drop every line that starts with `patterns[0]`.
///  - regex-range: drop each block of lines from one matching `patterns[0]`
///    through the next line matching `patterns[1]` (inclusive). An end
///    pattern of `<EOF>` runs to the end of the text. A begin line with no
///    matching end is left alone.
///  - literal-block: drop every occurrence of `patterns[0]`, which may span
///    lines (`\n`, `\t` and `\\` escapes are decoded when parsed from a file).
struct StripRule {
  enum class Kind { kLinePrefix, kRegexRange, kLiteralBlock };

  Kind kind = Kind::kLinePrefix;
  std::vector<std::string> patterns;
};

/// One rule per line, `kind<TAB>pattern[<TAB>pattern]`; blank lines and
/// lines starting with `#` are ignored. Throws Error(kMalformedRule) with the
/// line number for unknown kinds, wrong arity, or an uncompilable regex.
std::vector<StripRule> parse_strip_rules(std::istream& in);
std::vector<StripRule> load_strip_rules(const std::filesystem::path& path);

/// Removes every rule-matched region, repeating until nothing changes, so
/// clean_text(clean_text(x)) == clean_text(x).
std::string clean_text(std::string_view raw, std::span<const StripRule> rules);

/// Prose splits after every '.', '!' or '?' (terminator dropped, no
/// whitespace needed after it, so "Mr. Smith" splits); poetry splits on
/// newlines. Whitespace-only spans are dropped; order is preserved.
std::vector<std::string> segment(std::string_view text, Mode mode);

/// Lowercases, deletes punctuation (Unicode P*), and splits on whitespace.
/// Deleting rather than replacing means "weather-beaten" -> "weatherbeaten".
std::vector<std::string> normalize(std::string_view span);

std::vector<Passage> build_passages(const TextDocument& doc, std::span<const StripRule> rules);

/// Reads a UTF-8 text file, dropping a leading byte-order mark.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace sgsm::corpus
