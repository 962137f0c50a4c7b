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
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sgsm::grammar {

using LabelId = std::uint8_t;

inline constexpr std::size_t kLabelCount = 28;

/// A story-element label. Ids follow the row order of the label table, so
/// `dispute` is 0 and `object characteristic` is 27.
struct Label {
  std::string_view name;
  std::string_view abbrev;
  LabelId id = 0;

  friend bool operator==(const Label& a, const Label& b) { return a.id == b.id; }
};

/// Named ids, mostly for tests and the builtin lexicon's default rule.
namespace ids {
inline constexpr LabelId kDispute = 0;
inline constexpr LabelId kDocument = 1;
inline constexpr LabelId kEvent = 2;
inline constexpr LabelId kTriplet = 3;
inline constexpr LabelId kSubject = 4;
inline constexpr LabelId kSubjectIndividual = 5;
inline constexpr LabelId kIndividualName = 6;
inline constexpr LabelId kIndividualCharacteristic = 7;
inline constexpr LabelId kSubjectGroup = 8;
inline constexpr LabelId kGroupName = 9;
inline constexpr LabelId kGroupCharacteristic = 10;
inline constexpr LabelId kSubjectInstitution = 11;
inline constexpr LabelId kAction = 12;
inline constexpr LabelId kActionVerb = 13;
inline constexpr LabelId kActionNegation = 14;
inline constexpr LabelId kActionModality = 15;
inline constexpr LabelId kActionCircumstances = 16;
inline constexpr LabelId kCircumstancesTime = 17;
inline constexpr LabelId kCircumstancesPlace = 18;
inline constexpr LabelId kCircumstancesType = 19;
inline constexpr LabelId kCircumstancesReason = 20;
inline constexpr LabelId kCircumstancesInstrument = 21;
inline constexpr LabelId kCircumstancesOutcome = 22;
inline constexpr LabelId kCircumstancesNumber = 23;
inline constexpr LabelId kObject = 24;
inline constexpr LabelId kSubjectObject = 25;
inline constexpr LabelId kObjectPhysical = 26;
inline constexpr LabelId kObjectCharacteristic = 27;
}  // namespace ids

std::span<const Label, kLabelCount> labels() noexcept;

/// Throws Error(kUnknownLabel) for ids outside [0, 27].
const Label& label(LabelId id);

std::string_view abbreviate(std::string_view name);
const Label& resolve(std::string_view abbrev);
const Label& find_by_name(std::string_view name);
std::optional<LabelId> try_resolve(std::string_view abbrev) noexcept;

std::vector<LabelId> encode_ids(std::span<const Label> seq);
std::vector<Label> decode_ids(std::span<const LabelId> ids);

// --- productions --------------------------------------------------------------

enum class Multiplicity {
  kOne,         // <x>
  kOptional,    // [<x>]
  kOneOrMore,   // {<x>}
  kZeroOrMore,  // [{<x>}]
};

struct RhsItem {
  std::string symbol;
  Multiplicity multiplicity = Multiplicity::kOne;
  /// Items sharing a group index are alternatives (`a | b | c`).
  std::optional<int> group;
};

struct Production {
  std::string lhs;
  std::vector<RhsItem> rhs;

  /// Rhs items grouped into sequential slots; an alternation group forms one
  /// slot placed at the position of its first member.
  std::vector<std::vector<const RhsItem*>> slots() const;
};

/// A non-terminal and the label it emits when visited. Auxiliary symbols
/// (no label of their own) emit the label of the node that expanded them.
struct NonTerminal {
  std::string name;
  std::optional<LabelId> label;
  /// Overrides keyed by the parent symbol, e.g. <name> under <individual>.
  std::vector<std::pair<std::string, LabelId>> by_parent;

  bool auxiliary() const noexcept { return !label && by_parent.empty(); }
};

/// Immutable after construction; safe to share across threads.
class Grammar {
 public:
  /// Throws Error(kInvalidArgument) if a rhs symbol is undeclared, the start
  /// symbol is missing or appears on a rhs, or a non-terminal has no label
  /// path (auxiliary at the root).
  Grammar(std::vector<NonTerminal> nonterminals,
          std::vector<Production> productions, std::string start);

  const std::string& start() const noexcept { return start_; }
  std::span<const NonTerminal> nonterminals() const noexcept { return nonterminals_; }
  std::span<const Production> productions() const noexcept { return productions_; }

  const NonTerminal* find(std::string_view symbol) const noexcept;
  std::vector<const Production*> productions_for(std::string_view lhs) const;

  /// Label emitted when `symbol` is expanded below `parent`, whose own
  /// emission was `inherited`. Pass an empty parent for the start symbol.
  LabelId emitted_label(std::string_view symbol, std::string_view parent,
                        std::optional<LabelId> inherited) const;

 private:
  std::vector<NonTerminal> nonterminals_;
  std::vector<Production> productions_;
  std::string start_;
};

/// The story grammar shipped with the library (13 productions, start <dispute>).
const Grammar& story_grammar();

struct GenerationLimits {
  int max_events = 2;
  int max_triplets = 2;
  /// Upper bound for every other one-or-more / zero-or-more item.
  int max_repeat = 2;
};

/// Expands the start symbol with choices drawn from a generator seeded by
/// `seed`; emits visited labels in preorder. Same seed, same sequence.
std::vector<Label> generate_sequence(const Grammar& grammar, std::uint64_t seed,
                                     const GenerationLimits& limits = {});

struct MembershipOptions {
  int repetition_cap = 8;
  /// Symbol to derive from; empty means the grammar's start symbol.
  std::string start;
};

struct MembershipResult {
  bool consistent = false;
  std::string diagnostic;
};

/// Order-insensitive membership: is the label multiset producible by some
/// derivation? Inconsistency is a result, not an error.
MembershipResult check_membership(const Grammar& grammar, std::span<const Label> seq,
                                  const MembershipOptions& options = {});

/// Same as above, but first resolves abbreviations; unregistered ones make
/// the sequence inconsistent.
MembershipResult check_membership(const Grammar& grammar,
                                  std::span<const std::string> abbrevs,
                                  const MembershipOptions& options = {});

std::string to_string(Multiplicity m, std::string_view symbol);
void dump(const Grammar& grammar, std::ostream& out);

}  // namespace sgsm::grammar
