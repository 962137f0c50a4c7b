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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sgsm/corpus.hpp"
#include "sgsm/labeler.hpp"
#include "sgsm/matcher.hpp"

namespace sgsm::cli {

enum class Subcommand { kSegment, kLabel, kMatch, kReport, kGrammarDump, kGrammarGen, kGrammarCheck };

/// Everything a subcommand needs; fields a subcommand does not use are ignored.
struct RunConfig {
  Subcommand subcommand = Subcommand::kSegment;

  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output;

  // segment
  corpus::Mode mode = corpus::Mode::kProse;
  std::optional<std::filesystem::path> strip_rules;
  std::string doc_id;  // empty: input file stem

  // label
  labeler::LabelerSpec labeler = labeler::BuiltinLexiconSpec{};

  // match / report
  std::uint32_t theta = 2;
  bool exact = false;
  std::size_t workers = 1;
  matcher::ScoreFormat format = matcher::ScoreFormat::kTsv;
  bool exclude_empty = false;

  // grammar
  std::uint64_t seed = 0;
  grammar::GenerationLimits limits;
  int repetition_cap = 8;
};

/// Throws Error(kInvalidArgument) when an input path equals the output path,
/// workers is zero, or the input count is wrong for the subcommand.
void validate(const RunConfig& config);

/// Returns N_p and reports it on `log` as `passages=N`.
std::size_t cmd_segment(const RunConfig& config, std::ostream& log);

/// Returns the number of labeled passages written.
std::size_t cmd_label(const RunConfig& config, std::ostream& log);

struct MatchStats {
  std::uint64_t comparisons = 0;
  std::uint64_t matches = 0;
};

/// Writes the scores file and a one-line summary
/// `comparisons=N matches=M theta=T mode=capped|exact` to `log`.
MatchStats cmd_match(const RunConfig& config, std::ostream& log);

/// Prints one `Source:` / `Target:` / `Score:` block per pair at or under Θ,
/// ordered by score, then source index, then target index.
std::size_t cmd_report(const RunConfig& config, std::ostream& out);

/// Returns false when any checked sequence is inconsistent.
bool cmd_grammar(const RunConfig& config, std::ostream& out);

/// Full command-line entry point: parses `argv`, dispatches, and turns
/// failures into a single `error: <Kind>: <message>` line on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sgsm::cli
