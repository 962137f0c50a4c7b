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

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "sgsm/corpus.hpp"
#include "sgsm/grammar.hpp"

namespace sgsm::labeler {

using grammar::LabelId;
using OptionalLabel = std::optional<LabelId>;

struct LabeledPassage {
  std::string doc_id;
  std::size_t index = 0;
  std::vector<std::string> tokens;
  std::vector<OptionalLabel> labels;

  friend bool operator==(const LabeledPassage&, const LabeledPassage&) = default;
};

/// Throws Error(kProtocolViolation) naming (doc_id, index) when labels and
/// tokens disagree in length or an id is outside the registry.
void validate(const LabeledPassage& lp);

/// The ordered, null-free label ids of one passage (its feature set).
struct LabelSequence {
  std::string doc_id;
  std::size_t index = 0;
  std::vector<LabelId> seq;

  std::vector<std::string_view> abbrevs() const;

  friend bool operator==(const LabelSequence&, const LabelSequence&) = default;
};

LabelSequence extract_sequence(const LabeledPassage& lp);

// --- builtin lexicon ------------------------------------------------------------

/// word -> label, then ordered fallback rules, then null.
struct Lexicon {
  struct FallbackRule {
    std::string name;
    std::function<bool(std::string_view)> matches;
    LabelId label;
  };

  std::unordered_map<std::string, LabelId> words;
  std::vector<FallbackRule> fallbacks = default_fallbacks();

  /// The only default rule: an all-digit token is a circumstance number.
  static std::vector<FallbackRule> default_fallbacks();
};

/// TSV `word<TAB>abbrev`; blank lines and `#` comments ignored. Throws
/// Error(kUnknownLabel) / Error(kParseError) with the line number.
Lexicon parse_lexicon(std::istream& in);
Lexicon load_lexicon(const std::filesystem::path& path);

std::vector<OptionalLabel> lexicon_label(std::span<const std::string> tokens,
                                         const Lexicon& lexicon);

// --- labeler selection ----------------------------------------------------------

struct BuiltinLexiconSpec {
  std::filesystem::path lexicon;  // empty path: empty lexicon
};

struct ExternalProcessSpec {
  std::string command;  // run through /bin/sh -c
  std::chrono::milliseconds timeout{std::chrono::seconds(120)};
  std::size_t batch_size = 256;
};

struct PrecomputedFileSpec {
  std::filesystem::path path;
};

using LabelerSpec = std::variant<BuiltinLexiconSpec, ExternalProcessSpec, PrecomputedFileSpec>;

/// `builtin:LEX`, `external:CMD`, or `file:PATH`; bare `builtin` has an
/// empty lexicon.
LabelerSpec parse_labeler_spec(std::string_view text);

class Labeler {
 public:
  virtual ~Labeler() = default;
  /// Output is in input order, one LabeledPassage per input passage.
  virtual std::vector<LabeledPassage> label(std::span<const corpus::Passage> passages) = 0;
};

std::unique_ptr<Labeler> make_labeler(const LabelerSpec& spec);

LabeledPassage label_passage(const corpus::Passage& p, const LabelerSpec& spec);

/// Streams `passages` through a child process speaking the line protocol:
/// requests `{"doc_id","index","tokens"}` on its stdin and responses
/// `{"doc_id","index","labels"}` on its stdout. Responses may arrive in any
/// order within a batch and are re-associated by (doc_id, index).
std::vector<LabeledPassage> run_external(std::span<const corpus::Passage> passages,
                                         const ExternalProcessSpec& spec);

// --- training data --------------------------------------------------------------

struct TrainingExample {
  std::vector<std::string> tokens;
  std::vector<OptionalLabel> labels;
};

/// CoNLL-style `token<TAB>abbrev-or-O`, blank line between sentences.
std::vector<TrainingExample> parse_training_set(std::istream& in);
std::vector<TrainingExample> load_training_set(const std::filesystem::path& path);

}  // namespace sgsm::labeler
