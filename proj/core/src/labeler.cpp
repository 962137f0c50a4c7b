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

#include "sgsm/labeler.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>

#include "external_process.hpp"
#include "sgsm/error.hpp"
#include "sgsm/io.hpp"

namespace sgsm::labeler {
namespace {

using Key = std::pair<std::string, std::size_t>;

std::string describe(const std::string& doc_id, std::size_t index) {
  return "(" + doc_id + ", " + std::to_string(index) + ")";
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  return in;
}

class LexiconLabeler final : public Labeler {
 public:
  explicit LexiconLabeler(Lexicon lexicon) : lexicon_(std::move(lexicon)) {}

  std::vector<LabeledPassage> label(std::span<const corpus::Passage> passages) override {
    std::vector<LabeledPassage> out;
    out.reserve(passages.size());
    for (const auto& p : passages) {
      out.push_back({p.doc_id, p.index, p.tokens, lexicon_label(p.tokens, lexicon_)});
    }
    return out;
  }

 private:
  Lexicon lexicon_;
};

class PrecomputedLabeler final : public Labeler {
 public:
  explicit PrecomputedLabeler(const std::filesystem::path& path) : path_(path) {
    for (auto& lp : io::read_labeled(path)) {
      Key key{lp.doc_id, lp.index};
      if (!by_key_.emplace(std::move(key), std::move(lp)).second) {
        throw Error(ErrorKind::kProtocolViolation,
                    path.string() + ": duplicate passage " + describe(lp.doc_id, lp.index));
      }
    }
  }

  std::vector<LabeledPassage> label(std::span<const corpus::Passage> passages) override {
    std::vector<LabeledPassage> out;
    out.reserve(passages.size());
    for (const auto& p : passages) {
      auto it = by_key_.find(Key{p.doc_id, p.index});
      if (it == by_key_.end()) {
        throw Error(ErrorKind::kMissingPassage,
                    path_.string() + " has no labels for passage " + describe(p.doc_id, p.index));
      }
      if (it->second.labels.size() != p.tokens.size()) {
        throw Error(ErrorKind::kProtocolViolation,
                    "precomputed labels for passage " + describe(p.doc_id, p.index) + " have " +
                        std::to_string(it->second.labels.size()) + " entries for " +
                        std::to_string(p.tokens.size()) + " tokens");
      }
      out.push_back({p.doc_id, p.index, p.tokens, it->second.labels});
    }
    return out;
  }

 private:
  std::filesystem::path path_;
  std::map<Key, LabeledPassage> by_key_;
};

class ExternalLabeler final : public Labeler {
 public:
  explicit ExternalLabeler(ExternalProcessSpec spec) : spec_(std::move(spec)) {}

  std::vector<LabeledPassage> label(std::span<const corpus::Passage> passages) override {
    return run_external(passages, spec_);
  }

 private:
  ExternalProcessSpec spec_;
};

}  // namespace

void validate(const LabeledPassage& lp) {
  if (lp.labels.size() != lp.tokens.size()) {
    throw Error(ErrorKind::kProtocolViolation,
                "passage " + describe(lp.doc_id, lp.index) + " has " +
                    std::to_string(lp.labels.size()) + " labels for " +
                    std::to_string(lp.tokens.size()) + " tokens");
  }
  for (const auto& l : lp.labels) {
    if (l && *l >= grammar::kLabelCount) {
      throw Error(ErrorKind::kProtocolViolation,
                  "passage " + describe(lp.doc_id, lp.index) + " carries unregistered label id " +
                      std::to_string(*l));
    }
  }
}

std::vector<std::string_view> LabelSequence::abbrevs() const {
  std::vector<std::string_view> out;
  out.reserve(seq.size());
  for (auto id : seq) out.push_back(grammar::label(id).abbrev);
  return out;
}

LabelSequence extract_sequence(const LabeledPassage& lp) {
  LabelSequence out{lp.doc_id, lp.index, {}};
  for (const auto& l : lp.labels) {
    if (l) out.seq.push_back(*l);
  }
  return out;
}

std::vector<Lexicon::FallbackRule> Lexicon::default_fallbacks() {
  return {{"digit-token",
           [](std::string_view token) {
             return !token.empty() &&
                    std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
           },
           grammar::ids::kCircumstancesNumber}};
}

Lexicon parse_lexicon(std::istream& in) {
  Lexicon lexicon;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || line.find('\t', tab + 1) != std::string::npos) {
      throw Error(ErrorKind::kParseError,
                  "lexicon line " + std::to_string(line_no) + ": expected word<TAB>abbrev");
    }
    const std::string abbrev = line.substr(tab + 1);
    auto id = grammar::try_resolve(abbrev);
    if (!id) {
      throw Error(ErrorKind::kUnknownLabel, "lexicon line " + std::to_string(line_no) +
                                                ": unknown label abbreviation '" + abbrev + "'");
    }
    lexicon.words.insert_or_assign(line.substr(0, tab), *id);
  }
  return lexicon;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_lexicon(in);
}

std::vector<OptionalLabel> lexicon_label(std::span<const std::string> tokens,
                                         const Lexicon& lexicon) {
  std::vector<OptionalLabel> labels;
  labels.reserve(tokens.size());
  for (const auto& token : tokens) {
    OptionalLabel label;
    if (auto it = lexicon.words.find(token); it != lexicon.words.end()) {
      label = it->second;
    } else {
      for (const auto& rule : lexicon.fallbacks) {
        if (rule.matches(token)) {
          label = rule.label;
          break;
        }
      }
    }
    labels.push_back(label);
  }
  return labels;
}

LabelerSpec parse_labeler_spec(std::string_view text) {
  if (text == "builtin") return BuiltinLexiconSpec{};
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorKind::kInvalidArgument,
                "labeler must be builtin:LEX, external:CMD or file:PATH, got '" +
                    std::string(text) + "'");
  }
  const std::string_view kind = text.substr(0, colon);
  const std::string value(text.substr(colon + 1));
  if (kind == "builtin") return BuiltinLexiconSpec{value};
  if (kind == "external") {
    if (value.empty()) throw Error(ErrorKind::kInvalidArgument, "external labeler needs a command");
    return ExternalProcessSpec{value};
  }
  if (kind == "file") {
    if (value.empty()) throw Error(ErrorKind::kInvalidArgument, "file labeler needs a path");
    return PrecomputedFileSpec{value};
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown labeler kind '" + std::string(kind) + "'");
}

std::unique_ptr<Labeler> make_labeler(const LabelerSpec& spec) {
  struct Visitor {
    std::unique_ptr<Labeler> operator()(const BuiltinLexiconSpec& s) const {
      return std::make_unique<LexiconLabeler>(s.lexicon.empty() ? Lexicon{} : load_lexicon(s.lexicon));
    }
    std::unique_ptr<Labeler> operator()(const ExternalProcessSpec& s) const {
      return std::make_unique<ExternalLabeler>(s);
    }
    std::unique_ptr<Labeler> operator()(const PrecomputedFileSpec& s) const {
      return std::make_unique<PrecomputedLabeler>(s.path);
    }
  };
  return std::visit(Visitor{}, spec);
}

LabeledPassage label_passage(const corpus::Passage& p, const LabelerSpec& spec) {
  auto labeled = make_labeler(spec)->label(std::span(&p, 1));
  return std::move(labeled.front());
}

std::vector<LabeledPassage> run_external(std::span<const corpus::Passage> passages,
                                         const ExternalProcessSpec& spec) {
  using Clock = std::chrono::steady_clock;
  if (spec.batch_size == 0) throw Error(ErrorKind::kInvalidArgument, "batch size must be positive");

  std::map<Key, std::size_t> position;
  for (std::size_t i = 0; i < passages.size(); ++i) {
    if (!position.emplace(Key{passages[i].doc_id, passages[i].index}, i).second) {
      throw Error(ErrorKind::kInvalidArgument,
                  "duplicate passage " + describe(passages[i].doc_id, passages[i].index));
    }
  }

  detail::Subprocess child(spec.command);
  std::vector<std::optional<LabeledPassage>> results(passages.size());
  std::string received;
  std::size_t consumed = 0;

  // Parses every complete response line buffered so far.
  auto drain_lines = [&](std::size_t batch_begin, std::size_t batch_end, std::size_t& answered) {
    for (std::size_t nl; (nl = received.find('\n', consumed)) != std::string::npos;) {
      std::string_view line(received.data() + consumed, nl - consumed);
      consumed = nl + 1;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      io::Response r = io::decode_response(line);
      auto it = position.find(Key{r.doc_id, r.index});
      if (it == position.end() || it->second < batch_begin || it->second >= batch_end) {
        throw Error(ErrorKind::kProtocolViolation,
                    "response for unrequested passage " + describe(r.doc_id, r.index));
      }
      auto& slot = results[it->second];
      if (slot) {
        throw Error(ErrorKind::kProtocolViolation,
                    "duplicate response for passage " + describe(r.doc_id, r.index));
      }
      const auto& p = passages[it->second];
      LabeledPassage lp{p.doc_id, p.index, p.tokens, std::move(r.labels)};
      validate(lp);
      slot = std::move(lp);
      ++answered;
    }
    if (consumed > (1u << 20)) {
      received.erase(0, consumed);
      consumed = 0;
    }
  };

  for (std::size_t begin = 0; begin < passages.size(); begin += spec.batch_size) {
    const std::size_t end = std::min(passages.size(), begin + spec.batch_size);
    std::string payload;
    for (std::size_t i = begin; i < end; ++i) {
      payload += io::encode_request(passages[i]);
      payload += '\n';
    }
    std::string_view pending = payload;
    std::size_t answered = 0;
    const auto deadline = Clock::now() + spec.timeout;
    const auto status = child.pump(pending, received, deadline, [&] {
      drain_lines(begin, end, answered);
      return answered == end - begin;
    });
    drain_lines(begin, end, answered);
    if (answered == end - begin) continue;

    std::string missing;
    for (std::size_t i = begin; i < end; ++i) {
      if (!results[i]) {
        missing = describe(passages[i].doc_id, passages[i].index);
        break;
      }
    }
    if (status == detail::Subprocess::IoStatus::kTimedOut) {
      throw Error(ErrorKind::kTimeout, "external labeler timed out after " +
                                           std::to_string(spec.timeout.count()) +
                                           " ms waiting for passage " + missing);
    }
    child.close_stdin();
    const auto code = child.wait(Clock::now() + std::chrono::seconds(5));
    throw Error(ErrorKind::kLabelerUnavailable,
                "external labeler closed its output before answering passage " + missing +
                    (code ? " (exit status " + std::to_string(*code) + ")" : std::string()));
  }

  child.close_stdin();
  std::string_view nothing;
  std::size_t extra = 0;
  const auto status =
      child.pump(nothing, received, Clock::now() + spec.timeout, [] { return false; });
  if (status == detail::Subprocess::IoStatus::kTimedOut) {
    throw Error(ErrorKind::kTimeout, "external labeler did not exit after end of input");
  }
  drain_lines(0, 0, extra);
  if (consumed < received.size()) {
    throw Error(ErrorKind::kProtocolViolation, "external labeler left a partial response line");
  }
  const auto code = child.wait(Clock::now() + spec.timeout);
  if (!code) throw Error(ErrorKind::kTimeout, "external labeler did not exit after end of input");
  if (*code != 0) {
    throw Error(ErrorKind::kLabelerUnavailable,
                "external labeler exited with status " + std::to_string(*code));
  }

  std::vector<LabeledPassage> out;
  out.reserve(passages.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

// --- training data --------------------------------------------------------------

std::vector<TrainingExample> parse_training_set(std::istream& in) {
  std::vector<TrainingExample> examples;
  TrainingExample current;
  auto flush = [&] {
    if (!current.tokens.empty()) examples.push_back(std::move(current));
    current = {};
  };
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || line.find('\t', tab + 1) != std::string::npos) {
      throw Error(ErrorKind::kParseError,
                  "training line " + std::to_string(line_no) + ": expected token<TAB>label");
    }
    const std::string tag = line.substr(tab + 1);
    OptionalLabel label;
    if (tag != "O") {
      label = grammar::try_resolve(tag);
      if (!label) {
        throw Error(ErrorKind::kUnknownLabel, "training line " + std::to_string(line_no) +
                                                  ": unknown label abbreviation '" + tag + "'");
      }
    }
    current.tokens.push_back(line.substr(0, tab));
    current.labels.push_back(label);
  }
  flush();
  return examples;
}

std::vector<TrainingExample> load_training_set(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_training_set(in);
}

}  // namespace sgsm::labeler
