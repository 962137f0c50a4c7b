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

#include "sgsm/grammar.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "sgsm/error.hpp"

namespace sgsm::grammar {
namespace {

constexpr std::array<Label, kLabelCount> kLabels = {{
    {"dispute", "disp", 0},
    {"document", "doc", 1},
    {"event", "event", 2},
    {"semantic triple", "trip", 3},
    {"subject", "subj", 4},
    {"subject individual", "subj-ind", 5},
    {"individual name", "ind-name", 6},
    {"individual characteristic", "ind-char", 7},
    {"subject group", "subj-group", 8},
    {"group name", "group-name", 9},
    {"group characteristic", "group-char", 10},
    {"subject institution", "subj-inst", 11},
    {"action", "act", 12},
    {"action verb", "act-verb", 13},
    {"action negation", "act-neg", 14},
    {"action modality", "act-mod", 15},
    {"action circumstances", "act-circumstances", 16},
    {"circumstances time", "circum-time", 17},
    {"circumstances place", "circum-place", 18},
    {"circumstances type", "circum-type", 19},
    {"circumstances reason", "circum-reas", 20},
    {"circumstances instrument", "circum-instr", 21},
    {"circumstances outcome", "circum-out", 22},
    {"circumstances number", "circum-num", 23},
    {"object", "obj", 24},
    {"subject obj", "subj-obj", 25},
    {"object physical object", "obj-physobj", 26},
    {"object characteristic", "obj-char", 27},
}};

std::string quoted(std::string_view s) {
  std::string out = "'";
  out.append(s);
  out += '\'';
  return out;
}

}  // namespace

std::span<const Label, kLabelCount> labels() noexcept { return kLabels; }

const Label& label(LabelId id) {
  if (id >= kLabelCount) {
    throw Error(ErrorKind::kUnknownLabel, "label id " + std::to_string(id) + " out of range");
  }
  return kLabels[id];
}

const Label& find_by_name(std::string_view name) {
  for (const auto& l : kLabels) {
    if (l.name == name) return l;
  }
  throw Error(ErrorKind::kUnknownLabel, "unknown label name " + quoted(name));
}

std::string_view abbreviate(std::string_view name) { return find_by_name(name).abbrev; }

std::optional<LabelId> try_resolve(std::string_view abbrev) noexcept {
  for (const auto& l : kLabels) {
    if (l.abbrev == abbrev) return l.id;
  }
  return std::nullopt;
}

const Label& resolve(std::string_view abbrev) {
  if (auto id = try_resolve(abbrev)) return kLabels[*id];
  throw Error(ErrorKind::kUnknownLabel, "unknown label abbreviation " + quoted(abbrev));
}

std::vector<LabelId> encode_ids(std::span<const Label> seq) {
  std::vector<LabelId> out;
  out.reserve(seq.size());
  for (const auto& l : seq) {
    // Reject labels that did not come from the registry.
    const auto& registered = label(l.id);
    if (registered.abbrev != l.abbrev || registered.name != l.name) {
      throw Error(ErrorKind::kUnknownLabel, "unregistered label " + quoted(l.abbrev));
    }
    out.push_back(l.id);
  }
  return out;
}

std::vector<Label> decode_ids(std::span<const LabelId> ids) {
  std::vector<Label> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(label(id));
  return out;
}

// --- productions --------------------------------------------------------------

std::vector<std::vector<const RhsItem*>> Production::slots() const {
  std::vector<std::vector<const RhsItem*>> out;
  std::map<int, std::size_t> group_slot;
  for (const auto& item : rhs) {
    if (item.group) {
      auto [it, inserted] = group_slot.emplace(*item.group, out.size());
      if (inserted) out.emplace_back();
      out[it->second].push_back(&item);
    } else {
      out.push_back({&item});
    }
  }
  return out;
}

Grammar::Grammar(std::vector<NonTerminal> nonterminals, std::vector<Production> productions,
                 std::string start)
    : nonterminals_(std::move(nonterminals)),
      productions_(std::move(productions)),
      start_(std::move(start)) {
  const NonTerminal* root = find(start_);
  if (root == nullptr) {
    throw Error(ErrorKind::kInvalidArgument, "start symbol <" + start_ + "> is not declared");
  }
  if (root->auxiliary()) {
    throw Error(ErrorKind::kInvalidArgument, "start symbol <" + start_ + "> carries no label");
  }
  for (const auto& p : productions_) {
    if (find(p.lhs) == nullptr) {
      throw Error(ErrorKind::kInvalidArgument, "production lhs <" + p.lhs + "> is not declared");
    }
    if (p.rhs.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "production for <" + p.lhs + "> has an empty rhs");
    }
    for (const auto& item : p.rhs) {
      if (find(item.symbol) == nullptr) {
        throw Error(ErrorKind::kInvalidArgument,
                    "rhs symbol <" + item.symbol + "> in <" + p.lhs + "> is not declared");
      }
      if (item.symbol == start_) {
        throw Error(ErrorKind::kInvalidArgument, "start symbol <" + start_ + "> appears on a rhs");
      }
    }
  }
}

const NonTerminal* Grammar::find(std::string_view symbol) const noexcept {
  for (const auto& nt : nonterminals_) {
    if (nt.name == symbol) return &nt;
  }
  return nullptr;
}

std::vector<const Production*> Grammar::productions_for(std::string_view lhs) const {
  std::vector<const Production*> out;
  for (const auto& p : productions_) {
    if (p.lhs == lhs) out.push_back(&p);
  }
  return out;
}

LabelId Grammar::emitted_label(std::string_view symbol, std::string_view parent,
                               std::optional<LabelId> inherited) const {
  const NonTerminal* nt = find(symbol);
  if (nt == nullptr) {
    throw Error(ErrorKind::kInvalidArgument, "unknown symbol <" + std::string(symbol) + ">");
  }
  for (const auto& [p, id] : nt->by_parent) {
    if (p == parent) return id;
  }
  if (nt->label) return *nt->label;
  if (!inherited) {
    throw Error(ErrorKind::kInvalidArgument,
                "auxiliary symbol <" + nt->name + "> has nothing to inherit");
  }
  return *inherited;
}

const Grammar& story_grammar() {
  using M = Multiplicity;
  static const Grammar grammar = [] {
    std::vector<NonTerminal> nts = {
        {"dispute", ids::kDispute, {}},
        {"document", ids::kDocument, {}},
        {"event", ids::kEvent, {}},
        {"semantic triplet", ids::kTriplet, {}},
        {"subject", ids::kSubject, {{"object", ids::kSubjectObject}}},
        {"individual", ids::kSubjectIndividual, {}},
        {"set of individuals", ids::kSubjectGroup, {}},
        {"institution", ids::kSubjectInstitution, {}},
        {"name", std::nullopt,
         {{"individual", ids::kIndividualName}, {"set of individuals", ids::kGroupName}}},
        {"first name", std::nullopt, {}},
        {"last name", std::nullopt, {}},
        {"name of group", std::nullopt, {}},
        {"characteristics", std::nullopt,
         {{"individual", ids::kIndividualCharacteristic},
          {"set of individuals", ids::kGroupCharacteristic}}},
        {"gender", std::nullopt, {}},
        {"occupation", std::nullopt, {}},
        {"age", std::nullopt, {}},
        {"work organization", std::nullopt, {}},
        {"action", ids::kAction, {}},
        {"verb", ids::kActionVerb, {}},
        {"negation", ids::kActionNegation, {}},
        {"modality", ids::kActionModality, {}},
        {"circumstances", ids::kActionCircumstances, {}},
        {"time", ids::kCircumstancesTime, {}},
        {"place", ids::kCircumstancesPlace, {}},
        {"type", ids::kCircumstancesType, {}},
        {"reason", ids::kCircumstancesReason, {}},
        {"instrument", ids::kCircumstancesInstrument, {}},
        {"outcome", ids::kCircumstancesOutcome, {}},
        {"object", ids::kObject, {}},
        {"physical object", ids::kObjectPhysical, {}},
    };
    std::vector<Production> ps = {
        {"dispute", {{"event", M::kOneOrMore, {}}, {"document", M::kOneOrMore, {}}}},
        {"event", {{"semantic triplet", M::kOneOrMore, {}}}},
        {"semantic triplet",
         {{"subject", M::kOneOrMore, {}},
          {"action", M::kOneOrMore, {}},
          {"object", M::kZeroOrMore, {}}}},
        {"subject",
         {{"individual", M::kOne, 0}, {"set of individuals", M::kOne, 0},
          {"institution", M::kOne, 0}}},
        {"action",
         {{"verb", M::kOne, {}},
          {"negation", M::kOptional, {}},
          {"modality", M::kOptional, {}},
          {"circumstances", M::kOne, {}}}},
        {"object", {{"subject", M::kOne, 0}, {"physical object", M::kOne, 0}}},
        {"individual", {{"name", M::kOne, {}}, {"characteristics", M::kOptional, {}}}},
        // <name of group> is optional here; read as mandatory it would force
        // a group name into every personal name.
        {"name",
         {{"first name", M::kOptional, {}},
          {"last name", M::kOptional, {}},
          {"name of group", M::kOptional, {}}}},
        {"characteristics",
         {{"gender", M::kOptional, {}},
          {"occupation", M::kOptional, {}},
          {"age", M::kOptional, {}},
          {"work organization", M::kOptional, {}}}},
        {"set of individuals", {{"name", M::kOne, {}}, {"characteristics", M::kOptional, {}}}},
        {"circumstances",
         {{"time", M::kOne, {}},
          {"place", M::kOne, {}},
          {"type", M::kOptional, {}},
          {"reason", M::kOptional, {}},
          {"instrument", M::kOptional, {}},
          {"outcome", M::kOptional, {}}}},
        {"instrument", {{"physical object", M::kOne, {}}}},
        // Second listing of <object>; together with the first one the
        // alternatives are subject | individual | physical object.
        {"object", {{"individual", M::kOne, 0}, {"physical object", M::kOne, 0}}},
    };
    return Grammar(std::move(nts), std::move(ps), "dispute");
  }();
  return grammar;
}

// --- compiled form shared by generation and membership -------------------------

namespace {

struct Slot {
  struct Alternative {
    int symbol;
    Multiplicity multiplicity;
  };
  std::vector<Alternative> alternatives;
};

struct CompiledGrammar {
  const Grammar* grammar;
  std::vector<std::string_view> names;
  std::vector<std::vector<std::vector<Slot>>> productions;  // by symbol

  explicit CompiledGrammar(const Grammar& g) : grammar(&g) {
    for (const auto& nt : g.nonterminals()) names.push_back(nt.name);
    productions.resize(names.size());
    for (const auto& p : g.productions()) {
      std::vector<Slot> slots;
      for (const auto& group : p.slots()) {
        Slot slot;
        for (const RhsItem* item : group) {
          slot.alternatives.push_back({index(item->symbol), item->multiplicity});
        }
        slots.push_back(std::move(slot));
      }
      productions[index(p.lhs)].push_back(std::move(slots));
    }
  }

  int index(std::string_view symbol) const {
    auto it = std::find(names.begin(), names.end(), symbol);
    if (it == names.end()) {
      throw Error(ErrorKind::kInvalidArgument, "unknown symbol <" + std::string(symbol) + ">");
    }
    return static_cast<int>(it - names.begin());
  }

  LabelId emit(int symbol, int parent, std::optional<LabelId> inherited) const {
    return grammar->emitted_label(names[symbol], parent < 0 ? std::string_view{} : names[parent],
                                  inherited);
  }
};

int repeat_upper(std::string_view symbol, const GenerationLimits& limits) {
  if (symbol == "event") return limits.max_events;
  if (symbol == "semantic triplet") return limits.max_triplets;
  return limits.max_repeat;
}

class Generator {
 public:
  Generator(const CompiledGrammar& g, std::uint64_t seed, const GenerationLimits& limits)
      : g_(g), rng_(seed), limits_(limits) {}

  void expand(int symbol, int parent, std::optional<LabelId> inherited, std::vector<Label>& out) {
    const LabelId emitted = g_.emit(symbol, parent, inherited);
    out.push_back(label(emitted));
    const auto& alternatives = g_.productions[symbol];
    if (alternatives.empty()) return;
    const auto& slots = alternatives[pick(alternatives.size())];
    for (const auto& slot : slots) {
      const auto& alt = slot.alternatives[pick(slot.alternatives.size())];
      const int upper = repeat_upper(g_.names[alt.symbol], limits_);
      int count = 1;
      switch (alt.multiplicity) {
        case Multiplicity::kOne: count = 1; break;
        case Multiplicity::kOptional: count = static_cast<int>(pick(2)); break;
        case Multiplicity::kOneOrMore: count = 1 + static_cast<int>(pick(upper)); break;
        case Multiplicity::kZeroOrMore: count = static_cast<int>(pick(upper + 1)); break;
      }
      for (int i = 0; i < count; ++i) expand(alt.symbol, symbol, emitted, out);
    }
  }

 private:
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  const CompiledGrammar& g_;
  std::mt19937_64 rng_;
  GenerationLimits limits_;
};

using Counts = std::array<std::uint16_t, kLabelCount>;

/// Exact multiset membership by aggregated instance counts.
///
/// A node type is (symbol, emitted label); its subtree shape depends on
/// nothing else. Because sibling order is irrelevant, a label multiset is
/// derivable iff there are integer instance counts per type and per rhs edge
/// such that every slot's per-instance bounds hold in aggregate. For a slot
/// with alternatives r, y instances and edge totals c_r are realizable iff
///   sum_r ceil(c_r / hi_r) <= y   and   (some lo_r == 0 or y <= sum_r c_r),
/// and sibling leaves emitting the same label only matter through their sum.
/// Types are visited in topological order; the last edge able to add to a
/// label is forced to close that label's count exactly.
class FlowSearch {
 public:
  FlowSearch(const CompiledGrammar& g, int root_symbol, int cap) : cap_(cap) {
    root_ = intern(root_symbol, g.emit(root_symbol, -1, std::nullopt));
    for (std::size_t t = 0; t < types_.size(); ++t) expand(g, t);
    order_topologically();
    index_last_contributors();
  }

  bool derivable(const Counts& target) {
    target_ = target;
    pending_.assign(types_.size(), 0);
    committed_.fill(0);
    failed_.clear();
    pending_[root_] = 1;
    committed_[types_[root_].label] = 1;
    if (committed_[types_[root_].label] > target_[types_[root_].label]) return false;
    return visit_type(0);
  }

 private:
  struct Alt {
    std::size_t child;
    int lo;  // per-instance lower bound multiplier
    int hi;  // per-instance upper bound multiplier
  };
  struct SlotInfo {
    std::vector<Alt> alts;
    std::size_t step = 0;
  };
  struct Type {
    int symbol;
    LabelId label;
    std::vector<std::vector<SlotInfo>> productions;
  };

  std::size_t intern(int symbol, LabelId label) {
    for (std::size_t t = 0; t < types_.size(); ++t) {
      if (types_[t].symbol == symbol && types_[t].label == label) return t;
    }
    types_.push_back({symbol, label, {}});
    return types_.size() - 1;
  }

  void expand(const CompiledGrammar& g, std::size_t t) {
    const int symbol = types_[t].symbol;
    const LabelId label = types_[t].label;
    std::vector<std::vector<SlotInfo>> productions;
    for (const auto& slots : g.productions[symbol]) {
      std::vector<SlotInfo> out;
      std::map<LabelId, std::size_t> merged_leaf;
      for (const auto& slot : slots) {
        SlotInfo info;
        for (const auto& alt : slot.alternatives) {
          const LabelId child_label = g.emit(alt.symbol, symbol, label);
          const std::size_t child = intern(alt.symbol, child_label);
          const bool lower = alt.multiplicity == Multiplicity::kOne ||
                             alt.multiplicity == Multiplicity::kOneOrMore;
          const bool many = alt.multiplicity == Multiplicity::kOneOrMore ||
                            alt.multiplicity == Multiplicity::kZeroOrMore;
          info.alts.push_back({child, lower ? 1 : 0, many ? cap_ : 1});
        }
        const bool leaf = g.productions[alt_symbol(info)].empty();
        if (info.alts.size() == 1 && leaf) {
          const LabelId l = types_[info.alts[0].child].label;
          if (auto it = merged_leaf.find(l); it != merged_leaf.end()) {
            out[it->second].alts[0].lo += info.alts[0].lo;
            out[it->second].alts[0].hi += info.alts[0].hi;
            continue;
          }
          merged_leaf.emplace(l, out.size());
        }
        out.push_back(std::move(info));
      }
      productions.push_back(std::move(out));
    }
    types_[t].productions = std::move(productions);
  }

  int alt_symbol(const SlotInfo& info) const { return types_[info.alts[0].child].symbol; }

  void order_topologically() {
    std::vector<int> state(types_.size(), 0);
    std::vector<std::size_t> post;
    auto dfs = [&](auto&& self, std::size_t t) -> void {
      if (state[t] == 2) return;
      if (state[t] == 1) {
        throw Error(ErrorKind::kInvalidArgument, "membership checking needs a non-recursive grammar");
      }
      state[t] = 1;
      for (const auto& slots : types_[t].productions) {
        for (const auto& slot : slots) {
          for (const auto& alt : slot.alts) self(self, alt.child);
        }
      }
      state[t] = 2;
      post.push_back(t);
    };
    dfs(dfs, root_);
    order_.assign(post.rbegin(), post.rend());
  }

  void index_last_contributors() {
    std::size_t step = 0;
    last_.fill({SIZE_MAX, SIZE_MAX});
    for (std::size_t t : order_) {
      for (auto& slots : types_[t].productions) {
        for (auto& slot : slots) {
          slot.step = step;
          for (std::size_t r = 0; r < slot.alts.size(); ++r) {
            last_[types_[slot.alts[r].child].label] = {step, r};
          }
          ++step;
        }
      }
    }
  }

  std::string memo_key(std::size_t position) const {
    std::string key;
    key.reserve(2 + 2 * (types_.size() + kLabelCount));
    auto put = [&](std::uint16_t v) {
      key += static_cast<char>(v & 0xFF);
      key += static_cast<char>(v >> 8);
    };
    put(static_cast<std::uint16_t>(position));
    for (std::size_t i = position; i < order_.size(); ++i) put(pending_[order_[i]]);
    for (auto c : committed_) put(c);
    return key;
  }

  bool visit_type(std::size_t position) {
    if (position == order_.size()) return committed_ == target_;
    const Type& type = types_[order_[position]];
    if (type.productions.empty()) return visit_type(position + 1);

    std::string key = memo_key(position);
    if (failed_.count(key)) return false;

    const int x = pending_[order_[position]];
    std::vector<int> y(type.productions.size(), 0);
    const bool ok = split(position, 0, x, y);
    if (!ok) failed_.insert(std::move(key));
    return ok;
  }

  // Distributes the type's x instances over its productions.
  bool split(std::size_t position, std::size_t p, int left, std::vector<int>& y) {
    const Type& type = types_[order_[position]];
    if (p + 1 == type.productions.size()) {
      y[p] = left;
      return visit_slot(position, 0, 0, y);
    }
    for (int v = 0; v <= left; ++v) {
      y[p] = v;
      if (split(position, p + 1, left - v, y)) return true;
    }
    return false;
  }

  bool visit_slot(std::size_t position, std::size_t p, std::size_t s, const std::vector<int>& y) {
    const Type& type = types_[order_[position]];
    while (p < type.productions.size() && s == type.productions[p].size()) {
      ++p;
      s = 0;
    }
    if (p == type.productions.size()) return visit_type(position + 1);
    const SlotInfo& slot = type.productions[p][s];
    std::vector<int> c(slot.alts.size(), 0);
    return visit_alt(position, p, s, 0, y, c);
  }

  bool visit_alt(std::size_t position, std::size_t p, std::size_t s, std::size_t r,
                 const std::vector<int>& y, std::vector<int>& c) {
    const SlotInfo& slot = types_[order_[position]].productions[p][s];
    const int instances = y[p];
    if (r == slot.alts.size()) {
      if (slot.alts.size() > 1 && !alternatives_fit(slot, instances, c)) return false;
      return visit_slot(position, p, s + 1, y);
    }
    const Alt& alt = slot.alts[r];
    const LabelId l = types_[alt.child].label;
    int lo = slot.alts.size() == 1 ? alt.lo * instances : 0;
    int hi = alt.hi * instances;
    const int budget = target_[l] - committed_[l];
    if (last_[l] == std::pair(slot.step, r)) {
      lo = std::max(lo, budget);
      hi = std::min(hi, budget);
    } else {
      hi = std::min(hi, budget);
    }
    for (int v = lo; v <= hi; ++v) {
      c[r] = v;
      pending_[alt.child] = static_cast<std::uint16_t>(pending_[alt.child] + v);
      committed_[l] = static_cast<std::uint16_t>(committed_[l] + v);
      const bool ok = visit_alt(position, p, s, r + 1, y, c);
      pending_[alt.child] = static_cast<std::uint16_t>(pending_[alt.child] - v);
      committed_[l] = static_cast<std::uint16_t>(committed_[l] - v);
      if (ok) return true;
    }
    return false;
  }

  static bool alternatives_fit(const SlotInfo& slot, int instances, const std::vector<int>& c) {
    long need = 0;
    long most = 0;
    bool unbounded = false;
    for (std::size_t r = 0; r < slot.alts.size(); ++r) {
      need += (c[r] + slot.alts[r].hi - 1) / slot.alts[r].hi;
      if (slot.alts[r].lo == 0) unbounded = true;
      most += c[r];
    }
    return need <= instances && (unbounded || instances <= most);
  }

  int cap_;
  std::vector<Type> types_;
  std::size_t root_ = 0;
  std::vector<std::size_t> order_;
  std::array<std::pair<std::size_t, std::size_t>, kLabelCount> last_{};

  Counts target_{};
  Counts committed_{};
  std::vector<std::uint16_t> pending_;
  std::unordered_set<std::string> failed_;
};

/// Static facts for diagnostics: which labels any derivation can emit, and
/// which labels are emitted by every ancestor chain leading to a given label.
struct Reachability {
  std::array<bool, kLabelCount> producible{};
  std::array<std::array<bool, kLabelCount>, kLabelCount> companions{};

  Reachability(const CompiledGrammar& g, int root) {
    struct Node {
      int symbol;
      int parent;
      std::optional<LabelId> inherited;
      LabelId emitted;
      auto key() const { return std::tuple(symbol, parent, inherited); }
    };
    std::vector<Node> nodes;
    std::map<std::tuple<int, int, std::optional<LabelId>>, std::size_t> index;
    std::vector<std::set<std::size_t>> parents;

    auto intern = [&](int symbol, int parent, std::optional<LabelId> inherited) {
      auto k = std::tuple(symbol, parent, inherited);
      if (auto it = index.find(k); it != index.end()) return std::pair(it->second, false);
      nodes.push_back({symbol, parent, inherited, g.emit(symbol, parent, inherited)});
      parents.emplace_back();
      index.emplace(k, nodes.size() - 1);
      return std::pair(nodes.size() - 1, true);
    };

    std::vector<std::size_t> work{intern(root, -1, std::nullopt).first};
    while (!work.empty()) {
      const std::size_t n = work.back();
      work.pop_back();
      const Node node = nodes[n];
      for (const auto& slots : g.productions[node.symbol]) {
        for (const auto& slot : slots) {
          for (const auto& alt : slot.alternatives) {
            auto [child, fresh] = intern(alt.symbol, node.symbol, node.emitted);
            parents[child].insert(n);
            if (fresh) work.push_back(child);
          }
        }
      }
    }

    // Greatest fixpoint of req(n) = {emit(n)} ∪ ⋂ req(parent).
    std::vector<std::array<bool, kLabelCount>> req(nodes.size());
    for (auto& r : req) r.fill(true);
    req[0].fill(false);
    req[0][nodes[0].emitted] = true;
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t n = 1; n < nodes.size(); ++n) {
        std::array<bool, kLabelCount> next;
        next.fill(true);
        for (std::size_t p : parents[n]) {
          for (std::size_t l = 0; l < kLabelCount; ++l) next[l] = next[l] && req[p][l];
        }
        next[nodes[n].emitted] = true;
        if (next != req[n]) {
          req[n] = next;
          changed = true;
        }
      }
    }

    for (auto& c : companions) c.fill(true);
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      const LabelId l = nodes[n].emitted;
      producible[l] = true;
      for (std::size_t k = 0; k < kLabelCount; ++k) {
        companions[l][k] = companions[l][k] && req[n][k];
      }
    }
    for (std::size_t l = 0; l < kLabelCount; ++l) companions[l][l] = false;
  }
};

}  // namespace

std::vector<Label> generate_sequence(const Grammar& grammar, std::uint64_t seed,
                                     const GenerationLimits& limits) {
  if (limits.max_events < 1 || limits.max_triplets < 1 || limits.max_repeat < 1) {
    throw Error(ErrorKind::kInvalidArgument, "generation limits must be positive");
  }
  const CompiledGrammar g(grammar);
  Generator gen(g, seed, limits);
  std::vector<Label> out;
  gen.expand(g.index(grammar.start()), -1, std::nullopt, out);
  return out;
}

MembershipResult check_membership(const Grammar& grammar, std::span<const Label> seq,
                                  const MembershipOptions& options) {
  if (options.repetition_cap < 1) {
    throw Error(ErrorKind::kInvalidArgument, "repetition cap must be positive");
  }
  const CompiledGrammar g(grammar);
  const std::string& start_name = options.start.empty() ? grammar.start() : options.start;
  const int root = g.index(start_name);
  const std::string start = "<" + start_name + ">";

  if (seq.empty()) {
    return {false, "empty sequence; " + start + " always emits at least one label"};
  }

  Counts counts{};
  for (const auto& l : seq) {
    const auto& registered = label(l.id);
    if (registered.abbrev != l.abbrev) {
      return {false, "unregistered label " + quoted(l.abbrev)};
    }
    if (counts[l.id] == 60000) {
      return {false, "label " + quoted(l.abbrev) + " occurs more than 60000 times"};
    }
    ++counts[l.id];
  }

  const Reachability reach(g, root);
  for (const auto& l : seq) {
    if (!reach.producible[l.id]) {
      return {false, "label " + quoted(l.abbrev) + " is not producible from " + start};
    }
  }
  for (const auto& l : seq) {
    std::string missing;
    for (std::size_t k = 0; k < kLabelCount; ++k) {
      if (reach.companions[l.id][k] && counts[k] == 0) {
        if (!missing.empty()) missing += ", ";
        missing += quoted(kLabels[k].abbrev);
      }
    }
    if (!missing.empty()) {
      return {false, "label " + quoted(l.abbrev) + " requires " + missing};
    }
  }

  FlowSearch search(g, root, options.repetition_cap);
  if (search.derivable(counts)) return {true, {}};
  std::ostringstream diag;
  diag << "label multiset is not derivable from " << start << " with at most "
       << options.repetition_cap << " repetitions per repeated item";
  return {false, diag.str()};
}

MembershipResult check_membership(const Grammar& grammar, std::span<const std::string> abbrevs,
                                  const MembershipOptions& options) {
  std::vector<Label> seq;
  seq.reserve(abbrevs.size());
  for (std::size_t i = 0; i < abbrevs.size(); ++i) {
    auto id = try_resolve(abbrevs[i]);
    if (!id) {
      return {false, "unregistered label " + quoted(abbrevs[i]) + " at position " +
                         std::to_string(i)};
    }
    seq.push_back(kLabels[*id]);
  }
  return check_membership(grammar, seq, options);
}

std::string to_string(Multiplicity m, std::string_view symbol) {
  std::string s = "<" + std::string(symbol) + ">";
  switch (m) {
    case Multiplicity::kOne: return s;
    case Multiplicity::kOptional: return "[" + s + "]";
    case Multiplicity::kOneOrMore: return "{" + s + "}";
    case Multiplicity::kZeroOrMore: return "[{" + s + "}]";
  }
  return s;
}

void dump(const Grammar& grammar, std::ostream& out) {
  out << "# labels: id\tabbrev\tname\n";
  for (const auto& l : kLabels) {
    out << static_cast<int>(l.id) << '\t' << l.abbrev << '\t' << l.name << '\n';
  }
  out << "# productions (start <" << grammar.start() << ">)\n";
  for (const auto& p : grammar.productions()) {
    out << '<' << p.lhs << "> ->";
    for (const auto& slot : p.slots()) {
      out << ' ';
      for (std::size_t i = 0; i < slot.size(); ++i) {
        if (i > 0) out << " | ";
        out << to_string(slot[i]->multiplicity, slot[i]->symbol);
      }
    }
    out << '\n';
  }
  out << "# emitted labels\n";
  for (const auto& nt : grammar.nonterminals()) {
    out << '<' << nt.name << ">\t";
    if (nt.auxiliary()) {
      out << "(inherits)";
    } else {
      out << (nt.label ? kLabels[*nt.label].abbrev : std::string_view("-"));
      for (const auto& [parent, id] : nt.by_parent) {
        out << "\tunder <" << parent << ">: " << kLabels[id].abbrev;
      }
    }
    out << '\n';
  }
}

}  // namespace sgsm::grammar
