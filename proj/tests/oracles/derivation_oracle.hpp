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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sgsm/grammar.hpp"

namespace sgsm::oracle {

using Multiset = std::array<std::uint8_t, grammar::kLabelCount>;

/// Every label multiset of at most `max_size` labels derivable from `start`,
/// found by rewriting sentential forms one pending symbol at a time. Each
/// expanded symbol emits one label, so forms whose emitted plus pending
/// count exceeds the bound are dropped and the enumeration terminates.
class DerivationOracle {
 public:
  DerivationOracle(const grammar::Grammar& g, const std::string& start, std::size_t max_size)
      : g_(g), max_(max_size) {
    Form root;
    root.pending.push_back({start, "", std::nullopt});
    rewrite(root);
  }

  bool contains(const Multiset& m) const { return found_.count(m) != 0; }
  const std::set<Multiset>& all() const { return found_; }

 private:
  struct Pending {
    std::string symbol;
    std::string parent;
    std::optional<grammar::LabelId> inherited;
  };
  struct Form {
    Multiset emitted{};
    std::size_t size = 0;
    std::vector<Pending> pending;
  };

  void rewrite(Form form) {
    if (form.size + form.pending.size() > max_) return;
    if (form.pending.empty()) {
      found_.insert(form.emitted);
      return;
    }
    Pending top = form.pending.back();
    form.pending.pop_back();
    const auto l = g_.emitted_label(top.symbol, top.parent, top.inherited);
    ++form.emitted[l];
    ++form.size;
    const auto prods = g_.productions_for(top.symbol);
    if (prods.empty()) {
      rewrite(std::move(form));
      return;
    }
    for (const auto* p : prods) {
      const auto slots = p->slots();
      place(form, top.symbol, l, slots, 0);
    }
  }

  // Chooses an alternative and a repeat count for each slot in turn.
  void place(const Form& form, const std::string& parent, grammar::LabelId l,
             const std::vector<std::vector<const grammar::RhsItem*>>& slots, std::size_t i) {
    if (form.size + form.pending.size() > max_) return;
    if (i == slots.size()) {
      rewrite(form);
      return;
    }
    for (const auto* item : slots[i]) {
      using M = grammar::Multiplicity;
      const std::size_t lo = (item->multiplicity == M::kOne || item->multiplicity == M::kOneOrMore) ? 1 : 0;
      const std::size_t hi = (item->multiplicity == M::kOne || item->multiplicity == M::kOptional) ? 1 : max_;
      Form next = form;
      for (std::size_t k = 0; k < lo; ++k) next.pending.push_back({item->symbol, parent, l});
      for (std::size_t k = lo; k <= hi; ++k) {
        place(next, parent, l, slots, i + 1);
        if (next.size + next.pending.size() >= max_) break;
        next.pending.push_back({item->symbol, parent, l});
      }
    }
  }

  const grammar::Grammar& g_;
  std::size_t max_;
  std::set<Multiset> found_;
};

}  // namespace sgsm::oracle
