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


#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles/levenshtein_oracle.hpp"
#include "sgsm/error.hpp"
#include "sgsm/grammar.hpp"
#include "sgsm/matcher.hpp"

namespace m = sgsm::matcher;
namespace g = sgsm::grammar;
using Seq = std::vector<g::LabelId>;

namespace {

Seq ids(std::initializer_list<const char*> abbrevs) {
  Seq out;
  for (const char* a : abbrevs) out.push_back(g::resolve(a).id);
  return out;
}

Seq random_seq(std::mt19937_64& rng, std::size_t max_len, int alphabet) {
  Seq s(std::uniform_int_distribution<std::size_t>(0, max_len)(rng));
  std::uniform_int_distribution<int> sym(0, alphabet - 1);
  for (auto& x : s) x = static_cast<g::LabelId>(sym(rng));
  return s;
}

m::LabelSequence sequence(std::string doc, std::size_t index, Seq seq) {
  return {std::move(doc), index, std::move(seq)};
}

std::size_t dist(const Seq& a, const Seq& b) { return m::levenshtein(a, b); }

}  // namespace

TEST_CASE("levenshtein examples") {
  const auto x = ids({"subj-ind", "act-verb", "obj-physobj"});
  CHECK(dist(x, x) == 0);
  CHECK(dist({}, ids({"subj-ind", "act-verb"})) == 2);
  CHECK(dist(ids({"act-neg", "act-verb", "subj-ind"}), ids({"subj-ind", "act-verb"})) == 2);
  CHECK(dist(ids({"subj-ind", "act-verb", "obj-physobj"}), ids({"subj-ind", "obj-physobj"})) == 1);
  CHECK(dist({}, {}) == 0);
}

TEST_CASE("levenshtein matches the recursion on short random pairs") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 3000; ++i) {
    const auto a = random_seq(rng, 7, 5);
    const auto b = random_seq(rng, 7, 5);
    const auto want = sgsm::oracle::naive_levenshtein(a, b);
    CHECK(dist(a, b) == want);
    CHECK(m::BitParallelPattern(a).distance(b) == want);
  }
}

TEST_CASE("all implementations agree on longer pairs") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10000; ++i) {
    const auto a = random_seq(rng, 64, 28);
    const auto b = random_seq(rng, 80, i % 2 ? 4 : 28);
    const auto exact = dist(a, b);
    CHECK(m::BitParallelPattern(a).distance(b) == exact);
    for (std::size_t cap : {0u, 1u, 2u, 5u, 17u, 100u}) {
      const auto capped = m::levenshtein_capped(a, b, cap);
      const auto bp = m::BitParallelPattern(a).distance_capped(b, cap);
      if (exact <= cap) {
        CHECK(capped == exact);
        CHECK(bp == exact);
      } else {
        CHECK_FALSE(capped.has_value());
        CHECK_FALSE(bp.has_value());
      }
    }
  }
}

TEST_CASE("capped examples") {
  const auto x = ids({"subj-ind", "act-verb"});
  CHECK(m::levenshtein_capped(x, x, 0) == 0u);
  CHECK_FALSE(m::levenshtein_capped(x, Seq{}, 1).has_value());
  CHECK(m::levenshtein_capped(x, Seq{}, 2) == 2u);
  CHECK_THROWS_AS(m::BitParallelPattern(Seq(65, 0)), sgsm::Error);
}

TEST_CASE("metric axioms") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10000; ++i) {
    const auto a = random_seq(rng, 32, 28);
    const auto b = random_seq(rng, 32, 28);
    const auto c = random_seq(rng, 32, 28);
    const auto ab = dist(a, b);
    CHECK(ab == dist(b, a));
    CHECK(dist(a, a) == 0);
    CHECK(dist(a, c) <= ab + dist(b, c));
    const auto lo = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
    CHECK(ab >= lo);
    CHECK(ab <= std::max(a.size(), b.size()));
  }
}

TEST_CASE("match_all cross product and ordering") {
  std::vector<m::LabelSequence> src{sequence("a", 0, ids({"subj-ind"})),
                                    sequence("a", 1, ids({"act-verb", "act-neg"}))};
  std::vector<m::LabelSequence> tgt{sequence("b", 0, {}), sequence("b", 1, ids({"subj-ind"})),
                                    sequence("b", 2, ids({"act-neg"}))};
  const auto run = m::match_all(src, tgt, {m::MatchMode::exact(), 1});
  REQUIRE(run.scores.size() == 6);
  CHECK(run.summary.total == 6);
  const std::vector<std::uint32_t> want{1, 0, 1, 2, 2, 1};
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(run.scores[k].source == k / 3);
    CHECK(run.scores[k].target == k % 3);
    CHECK(run.scores[k].value == want[k]);
  }

  const auto self = m::match_all(src, src, {m::MatchMode::capped(0), 1});
  for (const auto& s : self.scores) {
    if (s.source == s.target) CHECK(s.value == 0u);
  }
}

TEST_CASE("match_all output does not depend on workers") {
  std::mt19937_64 rng(4);
  std::vector<m::LabelSequence> src, tgt;
  for (std::size_t i = 0; i < 300; ++i) src.push_back(sequence("s", i, random_seq(rng, 12, 6)));
  for (std::size_t i = 0; i < 500; ++i) tgt.push_back(sequence("t", i, random_seq(rng, 12, 6)));
  src.push_back(sequence("s", 300, Seq(70, 1)));  // longer than one machine word

  for (auto mode : {m::MatchMode::exact(), m::MatchMode::capped(2)}) {
    std::string reference;
    for (std::size_t workers : {1u, 2u, 8u}) {
      std::ostringstream out;
      m::ScoreWriter writer(out, src, tgt, mode);
      std::uint64_t records = 0;
      const auto summary = m::match_all(src, tgt, {mode, workers}, [&](std::span<const m::Score> b) {
        records += b.size();
        writer.write(b);
      });
      writer.flush();
      CHECK(records == src.size() * tgt.size());
      CHECK(summary.total == records);
      if (reference.empty()) reference = out.str();
      CHECK(out.str() == reference);
    }
  }
}

TEST_CASE("filter_threshold") {
  m::MatchRun run;
  run.summary.mode = m::MatchMode::exact();
  for (std::uint32_t v : {20u, 2u, 1u, 3u}) run.scores.push_back({0, v, v});
  const auto kept = m::filter_threshold(run, {2});
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].value == 2u);
  CHECK(kept[1].value == 1u);
  CHECK(m::filter_threshold(run, {100}).size() == 4);

  run.summary.mode = m::MatchMode::capped(1);
  try {
    m::filter_threshold(run, {2});
    FAIL("expected ThresholdAboveCap");
  } catch (const sgsm::Error& e) {
    CHECK(e.kind() == sgsm::ErrorKind::kThresholdAboveCap);
  }
  CHECK(m::filter_threshold(run, {1}).size() == 1);
}

TEST_CASE("comparison_count") {
  CHECK(m::comparison_count(943, 2585) == 2437655);
  CHECK(m::comparison_count(3110, 10631) == 33062410);
  CHECK(m::comparison_count(0, 77) == 0);
}

TEST_CASE("score lines") {
  const auto r = m::parse_score_line("alice\t3\tgulliver\t10\t2");
  CHECK(r.source_doc == "alice");
  CHECK(r.source_index == 3);
  CHECK(r.target_index == 10);
  CHECK(r.value == 2u);
  const auto over = m::parse_score_line("a\t0\tb\t1\t>2");
  CHECK_FALSE(over.value.has_value());
  CHECK(over.cap == 2u);
  CHECK_THROWS_AS(m::parse_score_line("a\t0\tb\t1"), sgsm::Error);
  CHECK_THROWS_AS(m::parse_score_line("a\tx\tb\t1\t2"), sgsm::Error);
}
