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


// Test double for the external labeler protocol. Reads request lines on
// stdin and answers on stdout; the first argument picks a behaviour:
//
//   echo            hash-based labels (default)
//   null            every label null
//   shuffle K       answer each group of K requests in reverse order
//   wrong-length    one label too few
//   duplicate       answer every request twice
//   unrequested     answer with a shifted index
//   unknown-label   answer with an unregistered abbreviation
//   exit-early      exit with status 3 after the first request
//   hang            read requests, never answer
//   partial         answer, then write half a line and exit

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"

namespace {

using nlohmann::json;

constexpr std::string_view kAbbrevs[] = {
    "disp",         "doc",         "event",      "trip",       "subj",
    "subj-ind",     "ind-name",    "ind-char",   "subj-group", "group-name",
    "group-char",   "subj-inst",   "act",        "act-verb",   "act-neg",
    "act-mod",      "act-circumstances", "circum-time", "circum-place", "circum-type",
    "circum-reas",  "circum-instr", "circum-out", "circum-num", "obj",
    "subj-obj",     "obj-physobj", "obj-char",
};

json echo_label(const std::string& token) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : token) h = (h ^ c) * 16777619u;
  if (h % 3 == 0) return nullptr;
  return std::string(kAbbrevs[h % std::size(kAbbrevs)]);
}

json answer(const json& request, std::string_view mode) {
  json labels = json::array();
  for (const auto& t : request.at("tokens")) {
    labels.push_back(mode == "null" ? json(nullptr) : echo_label(t.get<std::string>()));
  }
  if (mode == "wrong-length") {
    if (labels.empty()) labels.push_back(nullptr);
    else labels.erase(labels.end() - 1);
  }
  if (mode == "unknown-label") labels = json::array({"not-a-label"});
  std::size_t index = request.at("index").get<std::size_t>();
  if (mode == "unrequested") index += 1000000;
  json out = json::object();
  out["doc_id"] = request.at("doc_id");
  out["index"] = index;
  out["labels"] = std::move(labels);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string_view mode = argc > 1 ? argv[1] : "echo";
  const std::size_t group = (mode == "shuffle" && argc > 2) ? std::stoul(argv[2]) : 1;
  std::vector<json> held;

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    if (mode == "exit-early") return 3;
    if (mode == "hang") {
      std::this_thread::sleep_for(std::chrono::hours(1));
      return 0;
    }
    held.push_back(answer(json::parse(line), mode));
    if (held.size() < group) continue;
    for (auto it = held.rbegin(); it != held.rend(); ++it) {
      std::cout << it->dump() << '\n';
      if (mode == "duplicate") std::cout << it->dump() << '\n';
    }
    held.clear();
    std::cout.flush();
  }
  for (auto it = held.rbegin(); it != held.rend(); ++it) std::cout << it->dump() << '\n';
  if (mode == "partial") std::cout << R"({"doc_id":"x",)";
  std::cout.flush();
  return 0;
}
