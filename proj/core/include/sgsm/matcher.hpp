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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgsm/grammar.hpp"
#include "sgsm/labeler.hpp"

namespace sgsm::matcher {

using grammar::LabelId;
using labeler::LabelSequence;

/// Unit-cost edit distance where each symbol is one whole label.
std::size_t levenshtein(std::span<const LabelId> a, std::span<const LabelId> b);
std::size_t levenshtein(const LabelSequence& a, const LabelSequence& b);

/// Exact distance when it is <= cap, nullopt ("exceeds cap") otherwise.
/// Prunes on length difference, then runs a band of width 2*cap+1 with a
/// row-minimum early exit.
std::optional<std::size_t> levenshtein_capped(std::span<const LabelId> a,
                                              std::span<const LabelId> b, std::size_t cap);
std::optional<std::size_t> levenshtein_capped(const LabelSequence& a, const LabelSequence& b,
                                              std::size_t cap);

/// Bit-vector edit distance for a fixed pattern of at most 64 labels
/// (Myers' algorithm in Hyyrö's global-distance form). One pattern is
/// compared against many texts in O(|text|) each.
class BitParallelPattern {
 public:
  static constexpr std::size_t kMaxLength = 64;

  explicit BitParallelPattern(std::span<const LabelId> pattern);

  std::size_t size() const noexcept { return length_; }
  std::size_t distance(std::span<const LabelId> text) const noexcept;
  /// Stops as soon as the remaining columns cannot bring the score back
  /// under `cap`.
  std::optional<std::size_t> distance_capped(std::span<const LabelId> text,
                                             std::size_t cap) const noexcept;

 private:
  std::array<std::uint64_t, 32> peq_{};
  std::size_t length_ = 0;
};

/// Θ: a pair matches when its distance is <= value.
struct Threshold {
  std::uint32_t value = 0;
};

/// Exact computes every distance; capped(c) only resolves distances <= c.
struct MatchMode {
  std::optional<std::uint32_t> cap;

  static MatchMode exact() { return {}; }
  static MatchMode capped(std::uint32_t c) { return {c}; }
  bool is_exact() const noexcept { return !cap.has_value(); }
};

/// One (source, target) pair. Positions index the input spans; `value` is
/// nullopt when a capped run found the distance above its cap.
struct Score {
  std::uint32_t source = 0;
  std::uint32_t target = 0;
  std::optional<std::uint32_t> value;

  bool matches(Threshold theta) const noexcept { return value && *value <= theta.value; }
  friend bool operator==(const Score&, const Score&) = default;
};

struct MatchOptions {
  MatchMode mode;
  std::size_t workers = 1;
};

struct MatchSummary {
  std::string source_doc;
  std::string target_doc;
  std::string metric = "levenshtein";
  MatchMode mode;
  std::uint64_t total = 0;
};

/// Receives consecutive blocks of records in source-major, target-minor
/// order. Blocks are only valid for the duration of the call.
using ScoreSink = std::function<void(std::span<const Score>)>;

/// Streams all |src|·|tgt| records to `sink` without holding the full cross
/// product in memory. Output order does not depend on `workers`.
MatchSummary match_all(std::span<const LabelSequence> src, std::span<const LabelSequence> tgt,
                       const MatchOptions& options, const ScoreSink& sink);

/// A fully materialized run, for small inputs and tests.
struct MatchRun {
  MatchSummary summary;
  std::vector<Score> scores;
};

MatchRun match_all(std::span<const LabelSequence> src, std::span<const LabelSequence> tgt,
                   const MatchOptions& options);

/// Records with value <= Θ, in run order. Throws Error(kThresholdAboveCap)
/// when the run was capped below Θ.
std::vector<Score> filter_threshold(const MatchRun& run, Threshold theta);

/// Same precondition check, usable before streaming.
void check_threshold(const MatchMode& mode, Threshold theta);

std::uint64_t comparison_count(std::uint64_t n_src, std::uint64_t n_tgt) noexcept;

// --- scores file ----------------------------------------------------------------

enum class ScoreFormat { kTsv, kJsonl };

/// Writes `src_doc<TAB>src_index<TAB>tgt_doc<TAB>tgt_index<TAB>score`, where
/// score is an integer or `>cap`, or the JSON Lines equivalent.
class ScoreWriter {
 public:
  ScoreWriter(std::ostream& out, std::span<const LabelSequence> src,
              std::span<const LabelSequence> tgt, MatchMode mode,
              ScoreFormat format = ScoreFormat::kTsv);
  ~ScoreWriter();

  void write(std::span<const Score> block);
  void flush();

 private:
  std::ostream& out_;
  std::span<const LabelSequence> src_;
  std::span<const LabelSequence> tgt_;
  MatchMode mode_;
  ScoreFormat format_;
  std::string buffer_;
};

struct ScoreRecord {
  std::string source_doc;
  std::size_t source_index = 0;
  std::string target_doc;
  std::size_t target_index = 0;
  std::optional<std::uint32_t> value;
  /// Set when the record reads `>cap`.
  std::optional<std::uint32_t> cap;
};

/// Parses one TSV line; throws Error(kParseError).
ScoreRecord parse_score_line(std::string_view line, std::size_t line_no = 0);

}  // namespace sgsm::matcher
