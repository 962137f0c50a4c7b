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

#include "sgsm/corpus.hpp"

#include <fstream>
#include <istream>
#include <regex>
#include <sstream>

#include "sgsm/error.hpp"
#include "unicode.hpp"

namespace sgsm::corpus {
namespace {

constexpr std::string_view kEndOfText = "<EOF>";

std::regex compile(const std::string& pattern, std::size_t line_no) {
  try {
    return std::regex(pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    std::string where = line_no > 0 ? "line " + std::to_string(line_no) + ": " : std::string();
    throw Error(ErrorKind::kMalformedRule,
                where + "cannot compile regex '" + pattern + "': " + e.what());
  }
}

std::string unescape(std::string_view s, std::size_t line_no) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (++i == s.size()) {
      throw Error(ErrorKind::kMalformedRule,
                  "line " + std::to_string(line_no) + ": dangling backslash");
    }
    switch (s[i]) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case '\\': out += '\\'; break;
      default:
        throw Error(ErrorKind::kMalformedRule, "line " + std::to_string(line_no) +
                                                   ": unknown escape '\\" + s[i] + "'");
    }
  }
  return out;
}

void validate(const StripRule& rule, std::size_t line_no) {
  const std::string where = line_no > 0 ? "line " + std::to_string(line_no) + ": " : "";
  const std::size_t want = rule.kind == StripRule::Kind::kRegexRange ? 2 : 1;
  if (rule.patterns.size() != want) {
    throw Error(ErrorKind::kMalformedRule, where + "expected " + std::to_string(want) +
                                               " pattern(s), got " +
                                               std::to_string(rule.patterns.size()));
  }
  if (rule.patterns[0].empty()) {
    throw Error(ErrorKind::kMalformedRule, where + "empty pattern");
  }
  if (rule.kind == StripRule::Kind::kRegexRange) {
    compile(rule.patterns[0], line_no);
    if (rule.patterns[1] != kEndOfText) compile(rule.patterns[1], line_no);
  }
}

struct Line {
  std::size_t begin;
  std::size_t end;  // one past the '\n', or text size for the last line
  std::string_view content;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    const std::size_t stop = nl == std::string_view::npos ? text.size() : nl + 1;
    std::string_view content = text.substr(pos, (nl == std::string_view::npos ? text.size() : nl) - pos);
    if (!content.empty() && content.back() == '\r') content.remove_suffix(1);
    lines.push_back({pos, stop, content});
    pos = stop;
  }
  return lines;
}

std::string drop_lines(std::string_view text, const std::vector<Line>& lines,
                       const std::vector<bool>& drop) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!drop[i]) out.append(text.substr(lines[i].begin, lines[i].end - lines[i].begin));
  }
  return out;
}

std::string apply_rule(std::string_view text, const StripRule& rule) {
  switch (rule.kind) {
    case StripRule::Kind::kLinePrefix: {
      const auto lines = split_lines(text);
      std::vector<bool> drop(lines.size());
      for (std::size_t i = 0; i < lines.size(); ++i) {
        drop[i] = lines[i].content.starts_with(rule.patterns[0]);
      }
      return drop_lines(text, lines, drop);
    }
    case StripRule::Kind::kRegexRange: {
      const auto lines = split_lines(text);
      const std::regex begin = compile(rule.patterns[0], 0);
      const bool to_eof = rule.patterns[1] == kEndOfText;
      const std::regex end = to_eof ? std::regex() : compile(rule.patterns[1], 0);
      auto matches = [](std::string_view s, const std::regex& re) {
        return std::regex_search(s.begin(), s.end(), re);
      };
      std::vector<bool> drop(lines.size());
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!matches(lines[i].content, begin)) continue;
        std::size_t j = i;
        if (to_eof) {
          j = lines.size() - 1;
        } else {
          while (j < lines.size() && !matches(lines[j].content, end)) ++j;
          if (j == lines.size()) break;
        }
        for (std::size_t k = i; k <= j; ++k) drop[k] = true;
        i = j;
      }
      return drop_lines(text, lines, drop);
    }
    case StripRule::Kind::kLiteralBlock: {
      const std::string& needle = rule.patterns[0];
      std::string out;
      out.reserve(text.size());
      std::size_t pos = 0;
      for (std::size_t hit; (hit = text.find(needle, pos)) != std::string_view::npos;) {
        out.append(text.substr(pos, hit - pos));
        pos = hit + needle.size();
      }
      out.append(text.substr(pos));
      return out;
    }
  }
  return std::string(text);
}

bool whitespace_only(std::string_view s) {
  for (std::size_t pos = 0; pos < s.size();) {
    if (!unicode::is_whitespace(unicode::decode(s, pos))) return false;
  }
  return true;
}

}  // namespace

Mode parse_mode(std::string_view text) {
  if (text == "prose") return Mode::kProse;
  if (text == "poetry") return Mode::kPoetry;
  throw Error(ErrorKind::kInvalidArgument,
              "mode must be 'prose' or 'poetry', got '" + std::string(text) + "'");
}

std::string_view to_string(Mode mode) { return mode == Mode::kProse ? "prose" : "poetry"; }

std::vector<StripRule> parse_strip_rules(std::istream& in) {
  std::vector<StripRule> rules;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (std::size_t tab; (tab = line.find('\t', pos)) != std::string::npos; pos = tab + 1) {
      fields.push_back(line.substr(pos, tab - pos));
    }
    fields.push_back(line.substr(pos));

    StripRule rule;
    const std::string& kind = fields[0];
    if (kind == "line-prefix") {
      rule.kind = StripRule::Kind::kLinePrefix;
    } else if (kind == "regex-range") {
      rule.kind = StripRule::Kind::kRegexRange;
    } else if (kind == "literal-block") {
      rule.kind = StripRule::Kind::kLiteralBlock;
    } else {
      throw Error(ErrorKind::kMalformedRule,
                  "line " + std::to_string(line_no) + ": unknown rule kind '" + kind + "'");
    }
    for (std::size_t i = 1; i < fields.size(); ++i) {
      rule.patterns.push_back(rule.kind == StripRule::Kind::kLiteralBlock
                                  ? unescape(fields[i], line_no)
                                  : fields[i]);
    }
    validate(rule, line_no);
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<StripRule> load_strip_rules(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open strip rules " + path.string());
  return parse_strip_rules(in);
}

std::string clean_text(std::string_view raw, std::span<const StripRule> rules) {
  for (const auto& rule : rules) validate(rule, 0);
  std::string text(raw);
  if (rules.empty()) return text;
  for (;;) {
    std::string next = text;
    for (const auto& rule : rules) next = apply_rule(next, rule);
    if (next == text) return text;
    text = std::move(next);
  }
}

std::vector<std::string> segment(std::string_view text, Mode mode) {
  std::vector<std::string> spans;
  auto emit = [&](std::string_view span) {
    if (mode == Mode::kPoetry && !span.empty() && span.back() == '\r') span.remove_suffix(1);
    if (!whitespace_only(span)) spans.emplace_back(span);
  };
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool boundary = mode == Mode::kProse ? (c == '.' || c == '!' || c == '?') : c == '\n';
    if (boundary) {
      emit(text.substr(start, i - start));
      start = i + 1;
    }
  }
  emit(text.substr(start));
  return spans;
}

std::vector<std::string> normalize(std::string_view span) {
  std::vector<std::string> tokens;
  std::string current;
  for (std::size_t pos = 0; pos < span.size();) {
    const char32_t cp = unicode::decode(span, pos);
    if (unicode::is_punctuation(cp)) continue;
    if (unicode::is_whitespace(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
      continue;
    }
    unicode::append_lower(current, cp);
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<Passage> build_passages(const TextDocument& doc, std::span<const StripRule> rules) {
  std::vector<Passage> passages;
  const std::string cleaned = clean_text(doc.raw, rules);
  for (auto& span : segment(cleaned, doc.mode)) {
    auto tokens = normalize(span);
    if (tokens.empty()) continue;
    passages.push_back({doc.doc_id, passages.size(), std::move(span), std::move(tokens)});
  }
  return passages;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = std::move(buf).str();
  if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
    out += text[i];
  }
  return out;
}

}  // namespace sgsm::corpus
