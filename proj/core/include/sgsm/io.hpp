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

#include "sgsm/corpus.hpp"
#include "sgsm/labeler.hpp"

// JSON Lines encodings of passages, labeled passages and the external
// labeler protocol. Lines are compact JSON with fields in a fixed order and
// no trailing newline; writers add '\n'.
namespace sgsm::io {

std::string to_json_line(const corpus::Passage& p);
std::string to_json_line(const labeler::LabeledPassage& lp);

/// Both parsers throw Error(kParseError) with `line_no` on malformed input;
/// the labeled parser also enforces label/token length agreement.
corpus::Passage parse_passage(std::string_view line, std::size_t line_no = 0);
labeler::LabeledPassage parse_labeled(std::string_view line, std::size_t line_no = 0);

void write_passages(std::ostream& out, std::span<const corpus::Passage> passages);
void write_labeled(std::ostream& out, std::span<const labeler::LabeledPassage> passages);

std::vector<corpus::Passage> read_passages(std::istream& in);
std::vector<corpus::Passage> read_passages(const std::filesystem::path& path);
std::vector<labeler::LabeledPassage> read_labeled(std::istream& in);
std::vector<labeler::LabeledPassage> read_labeled(const std::filesystem::path& path);

/// Accepts either a passages file or a labeled passages file; raw_span is
/// empty for labeled input.
std::vector<corpus::Passage> read_passage_text(const std::filesystem::path& path);

// --- external labeler protocol --------------------------------------------------

std::string encode_request(const corpus::Passage& p);
std::string encode_response(const labeler::LabeledPassage& lp);

struct Request {
  std::string doc_id;
  std::size_t index = 0;
  std::vector<std::string> tokens;
};

struct Response {
  std::string doc_id;
  std::size_t index = 0;
  std::vector<labeler::OptionalLabel> labels;
};

/// Throw Error(kProtocolViolation) for anything not matching the protocol,
/// including unregistered label abbreviations.
Request decode_request(std::string_view line);
Response decode_response(std::string_view line);

}  // namespace sgsm::io
