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

#include "sgsm/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "sgsm/error.hpp"

namespace sgsm::io {
namespace {

using Json = nlohmann::ordered_json;

std::string dump(const Json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string at_line(std::size_t line_no) {
  return line_no > 0 ? "line " + std::to_string(line_no) + ": " : std::string();
}

Json parse_object(std::string_view line, ErrorKind kind, const std::string& where) {
  Json j = Json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded()) throw Error(kind, where + "invalid JSON");
  if (!j.is_object()) throw Error(kind, where + "expected a JSON object");
  return j;
}

const Json& field(const Json& j, const char* name, ErrorKind kind, const std::string& where) {
  auto it = j.find(name);
  if (it == j.end()) throw Error(kind, where + "missing field '" + name + "'");
  return *it;
}

std::string get_doc_id(const Json& j, ErrorKind kind, const std::string& where) {
  const Json& v = field(j, "doc_id", kind, where);
  if (!v.is_string()) throw Error(kind, where + "'doc_id' must be a string");
  return v.get<std::string>();
}

std::size_t get_index(const Json& j, ErrorKind kind, const std::string& where) {
  const Json& v = field(j, "index", kind, where);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw Error(kind, where + "'index' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<std::string> get_tokens(const Json& j, ErrorKind kind, const std::string& where) {
  const Json& v = field(j, "tokens", kind, where);
  if (!v.is_array()) throw Error(kind, where + "'tokens' must be an array");
  std::vector<std::string> tokens;
  tokens.reserve(v.size());
  for (const auto& t : v) {
    if (!t.is_string()) throw Error(kind, where + "'tokens' entries must be strings");
    tokens.push_back(t.get<std::string>());
  }
  return tokens;
}

std::vector<labeler::OptionalLabel> get_labels(const Json& j, ErrorKind kind,
                                               const std::string& where) {
  const Json& v = field(j, "labels", kind, where);
  if (!v.is_array()) throw Error(kind, where + "'labels' must be an array");
  std::vector<labeler::OptionalLabel> labels;
  labels.reserve(v.size());
  for (const auto& l : v) {
    if (l.is_null()) {
      labels.emplace_back();
    } else if (l.is_string()) {
      auto id = grammar::try_resolve(l.get<std::string>());
      if (!id) {
        throw Error(kind == ErrorKind::kProtocolViolation ? kind : ErrorKind::kUnknownLabel,
                    where + "unknown label abbreviation '" + l.get<std::string>() + "'");
      }
      labels.push_back(id);
    } else {
      throw Error(kind, where + "'labels' entries must be strings or null");
    }
  }
  return labels;
}

Json labels_json(const std::vector<labeler::OptionalLabel>& labels) {
  Json arr = Json::array();
  for (const auto& l : labels) {
    if (l) {
      arr.push_back(std::string(grammar::label(*l).abbrev));
    } else {
      arr.push_back(nullptr);
    }
  }
  return arr;
}

template <typename T, typename Parse>
std::vector<T> read_lines(std::istream& in, Parse parse) {
  std::vector<T> out;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(parse(line, line_no));
  }
  return out;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return in;
}

std::string passage_key(const std::string& doc_id, std::size_t index) {
  return "(" + doc_id + ", " + std::to_string(index) + ")";
}

}  // namespace

std::string to_json_line(const corpus::Passage& p) {
  Json j;
  j["doc_id"] = p.doc_id;
  j["index"] = p.index;
  j["raw_span"] = p.raw_span;
  j["tokens"] = p.tokens;
  return dump(j);
}

std::string to_json_line(const labeler::LabeledPassage& lp) {
  Json j;
  j["doc_id"] = lp.doc_id;
  j["index"] = lp.index;
  j["tokens"] = lp.tokens;
  j["labels"] = labels_json(lp.labels);
  return dump(j);
}

corpus::Passage parse_passage(std::string_view line, std::size_t line_no) {
  const std::string where = at_line(line_no);
  const Json j = parse_object(line, ErrorKind::kParseError, where);
  corpus::Passage p;
  p.doc_id = get_doc_id(j, ErrorKind::kParseError, where);
  p.index = get_index(j, ErrorKind::kParseError, where);
  const Json& raw = field(j, "raw_span", ErrorKind::kParseError, where);
  if (!raw.is_string()) throw Error(ErrorKind::kParseError, where + "'raw_span' must be a string");
  p.raw_span = raw.get<std::string>();
  p.tokens = get_tokens(j, ErrorKind::kParseError, where);
  return p;
}

labeler::LabeledPassage parse_labeled(std::string_view line, std::size_t line_no) {
  const std::string where = at_line(line_no);
  const Json j = parse_object(line, ErrorKind::kParseError, where);
  labeler::LabeledPassage lp;
  lp.doc_id = get_doc_id(j, ErrorKind::kParseError, where);
  lp.index = get_index(j, ErrorKind::kParseError, where);
  lp.tokens = get_tokens(j, ErrorKind::kParseError, where);
  lp.labels = get_labels(j, ErrorKind::kParseError, where);
  if (lp.labels.size() != lp.tokens.size()) {
    throw Error(ErrorKind::kParseError,
                where + "passage " + passage_key(lp.doc_id, lp.index) + " has " +
                    std::to_string(lp.labels.size()) + " labels for " +
                    std::to_string(lp.tokens.size()) + " tokens");
  }
  return lp;
}

void write_passages(std::ostream& out, std::span<const corpus::Passage> passages) {
  for (const auto& p : passages) out << to_json_line(p) << '\n';
}

void write_labeled(std::ostream& out, std::span<const labeler::LabeledPassage> passages) {
  for (const auto& lp : passages) out << to_json_line(lp) << '\n';
}

std::vector<corpus::Passage> read_passages(std::istream& in) {
  return read_lines<corpus::Passage>(
      in, [](const std::string& line, std::size_t n) { return parse_passage(line, n); });
}

std::vector<corpus::Passage> read_passages(const std::filesystem::path& path) {
  auto in = open(path);
  return read_passages(in);
}

std::vector<labeler::LabeledPassage> read_labeled(std::istream& in) {
  return read_lines<labeler::LabeledPassage>(
      in, [](const std::string& line, std::size_t n) { return parse_labeled(line, n); });
}

std::vector<labeler::LabeledPassage> read_labeled(const std::filesystem::path& path) {
  auto in = open(path);
  return read_labeled(in);
}

std::vector<corpus::Passage> read_passage_text(const std::filesystem::path& path) {
  auto in = open(path);
  return read_lines<corpus::Passage>(in, [](const std::string& line, std::size_t n) {
    const std::string where = at_line(n);
    const Json j = parse_object(line, ErrorKind::kParseError, where);
    corpus::Passage p;
    p.doc_id = get_doc_id(j, ErrorKind::kParseError, where);
    p.index = get_index(j, ErrorKind::kParseError, where);
    p.tokens = get_tokens(j, ErrorKind::kParseError, where);
    if (auto it = j.find("raw_span"); it != j.end() && it->is_string()) {
      p.raw_span = it->get<std::string>();
    }
    return p;
  });
}

std::string encode_request(const corpus::Passage& p) {
  Json j;
  j["doc_id"] = p.doc_id;
  j["index"] = p.index;
  j["tokens"] = p.tokens;
  return dump(j);
}

std::string encode_response(const labeler::LabeledPassage& lp) {
  Json j;
  j["doc_id"] = lp.doc_id;
  j["index"] = lp.index;
  j["labels"] = labels_json(lp.labels);
  return dump(j);
}

Request decode_request(std::string_view line) {
  const std::string where = "request: ";
  const Json j = parse_object(line, ErrorKind::kProtocolViolation, where);
  Request r;
  r.doc_id = get_doc_id(j, ErrorKind::kProtocolViolation, where);
  r.index = get_index(j, ErrorKind::kProtocolViolation, where);
  r.tokens = get_tokens(j, ErrorKind::kProtocolViolation, where);
  return r;
}

Response decode_response(std::string_view line) {
  const std::string where = "response: ";
  const Json j = parse_object(line, ErrorKind::kProtocolViolation, where);
  Response r;
  r.doc_id = get_doc_id(j, ErrorKind::kProtocolViolation, where);
  r.index = get_index(j, ErrorKind::kProtocolViolation, where);
  r.labels = get_labels(j, ErrorKind::kProtocolViolation,
                        "response for passage " + passage_key(r.doc_id, r.index) + ": ");
  return r;
}

}  // namespace sgsm::io
