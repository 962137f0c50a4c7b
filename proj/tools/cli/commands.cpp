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

#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "sgsm/error.hpp"
#include "sgsm/grammar.hpp"
#include "sgsm/io.hpp"

namespace sgsm::cli {
namespace {

std::size_t expected_inputs(Subcommand s) {
  switch (s) {
    case Subcommand::kSegment:
    case Subcommand::kLabel:
    case Subcommand::kGrammarCheck: return 1;
    case Subcommand::kMatch: return 2;
    case Subcommand::kReport: return 3;
    case Subcommand::kGrammarDump:
    case Subcommand::kGrammarGen: return 0;
  }
  return 0;
}

bool writes_output(Subcommand s) {
  return s == Subcommand::kSegment || s == Subcommand::kLabel || s == Subcommand::kMatch;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

std::vector<labeler::LabelSequence> load_sequences(const std::filesystem::path& path) {
  std::vector<labeler::LabelSequence> seqs;
  for (const auto& lp : io::read_labeled(path)) seqs.push_back(labeler::extract_sequence(lp));
  return seqs;
}

std::string joined(const std::vector<std::string>& tokens) {
  std::string s;
  for (const auto& t : tokens) {
    if (!s.empty()) s += ' ';
    s += t;
  }
  return s;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

}  // namespace

void validate(const RunConfig& config) {
  const std::size_t want = expected_inputs(config.subcommand);
  if (config.inputs.size() != want) {
    throw Error(ErrorKind::kInvalidArgument, "expected " + std::to_string(want) +
                                                 " input path(s), got " +
                                                 std::to_string(config.inputs.size()));
  }
  if (writes_output(config.subcommand)) {
    if (config.output.empty()) throw Error(ErrorKind::kInvalidArgument, "missing output path");
    for (const auto& in : config.inputs) {
      std::error_code ec;
      const bool same = in == config.output ||
                        (std::filesystem::exists(config.output) &&
                         std::filesystem::equivalent(in, config.output, ec));
      if (same) {
        throw Error(ErrorKind::kInvalidArgument,
                    "output path " + config.output.string() + " is also an input");
      }
    }
  }
  if (config.workers == 0) throw Error(ErrorKind::kInvalidArgument, "workers must be >= 1");
}

std::size_t cmd_segment(const RunConfig& config, std::ostream& log) {
  validate(config);
  const auto& input = config.inputs.front();
  corpus::TextDocument doc;
  doc.doc_id = config.doc_id.empty() ? input.stem().string() : config.doc_id;
  doc.mode = config.mode;
  doc.raw = corpus::read_text_file(input);

  std::vector<corpus::StripRule> rules;
  if (config.strip_rules) rules = corpus::load_strip_rules(*config.strip_rules);

  const auto passages = corpus::build_passages(doc, rules);
  auto out = open_output(config.output);
  io::write_passages(out, passages);
  finish(out, config.output);
  log << "passages=" << passages.size() << '\n';
  return passages.size();
}

std::size_t cmd_label(const RunConfig& config, std::ostream& log) {
  validate(config);
  const auto passages = io::read_passages(config.inputs.front());
  auto labeler = labeler::make_labeler(config.labeler);
  const auto labeled = labeler->label(passages);
  if (labeled.size() != passages.size()) {
    throw Error(ErrorKind::kProtocolViolation, "labeler returned " +
                                                   std::to_string(labeled.size()) +
                                                   " passages for " +
                                                   std::to_string(passages.size()));
  }
  for (const auto& lp : labeled) labeler::validate(lp);
  auto out = open_output(config.output);
  io::write_labeled(out, labeled);
  finish(out, config.output);
  log << "labeled=" << labeled.size() << '\n';
  return labeled.size();
}

MatchStats cmd_match(const RunConfig& config, std::ostream& log) {
  validate(config);
  const auto src = load_sequences(config.inputs[0]);
  const auto tgt = load_sequences(config.inputs[1]);

  matcher::MatchOptions options;
  options.mode = config.exact ? matcher::MatchMode::exact() : matcher::MatchMode::capped(config.theta);
  options.workers = config.workers;
  const matcher::Threshold theta{config.theta};
  matcher::check_threshold(options.mode, theta);

  auto out = open_output(config.output);
  MatchStats stats;
  {
    matcher::ScoreWriter writer(out, src, tgt, options.mode, config.format);
    const auto summary = matcher::match_all(src, tgt, options, [&](std::span<const matcher::Score> block) {
      for (const auto& s : block) {
        if (!s.matches(theta)) continue;
        if (config.exclude_empty && src[s.source].seq.empty() && tgt[s.target].seq.empty()) continue;
        ++stats.matches;
      }
      writer.write(block);
    });
    writer.flush();
    stats.comparisons = summary.total;
  }
  finish(out, config.output);
  log << "comparisons=" << stats.comparisons << " matches=" << stats.matches
      << " theta=" << config.theta << " mode=" << (config.exact ? "exact" : "capped") << '\n';
  return stats;
}

std::size_t cmd_report(const RunConfig& config, std::ostream& out) {
  validate(config);
  using Key = std::pair<std::string, std::size_t>;
  auto load = [](const std::filesystem::path& path) {
    std::map<Key, std::string> text;
    for (auto& p : io::read_passage_text(path)) text.emplace(Key{p.doc_id, p.index}, joined(p.tokens));
    return text;
  };
  const auto source_text = load(config.inputs[1]);
  const auto target_text = load(config.inputs[2]);

  std::ifstream scores(config.inputs[0], std::ios::binary);
  if (!scores) throw Error(ErrorKind::kIo, "cannot open " + config.inputs[0].string());

  struct Hit {
    std::uint32_t score;
    std::size_t source;
    std::size_t target;
    const std::string* source_text;
    const std::string* target_text;
  };
  std::vector<Hit> hits;
  auto lookup = [](const std::map<Key, std::string>& m, const std::string& doc, std::size_t index,
                   const char* side) -> const std::string* {
    auto it = m.find(Key{doc, index});
    if (it == m.end()) {
      throw Error(ErrorKind::kDanglingReference, std::string(side) + " passage (" + doc + ", " +
                                                     std::to_string(index) +
                                                     ") is not in the passages file");
    }
    return &it->second;
  };

  std::string line;
  for (std::size_t line_no = 1; std::getline(scores, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto r = matcher::parse_score_line(line, line_no);
    const auto* s = lookup(source_text, r.source_doc, r.source_index, "source");
    const auto* t = lookup(target_text, r.target_doc, r.target_index, "target");
    if (r.cap) {
      matcher::check_threshold(matcher::MatchMode::capped(*r.cap), {config.theta});
      continue;
    }
    if (*r.value <= config.theta) hits.push_back({*r.value, r.source_index, r.target_index, s, t});
  }

  std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return std::tie(a.score, a.source, a.target) < std::tie(b.score, b.source, b.target);
  });
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (i > 0) out << '\n';
    out << "Source: \"" << *hits[i].source_text << "\"\n"
        << "Target: \"" << *hits[i].target_text << "\"\n"
        << "Score: " << hits[i].score << '\n';
  }
  return hits.size();
}

bool cmd_grammar(const RunConfig& config, std::ostream& out) {
  validate(config);
  const auto& g = grammar::story_grammar();
  switch (config.subcommand) {
    case Subcommand::kGrammarDump:
      grammar::dump(g, out);
      return true;
    case Subcommand::kGrammarGen: {
      const auto seq = grammar::generate_sequence(g, config.seed, config.limits);
      for (std::size_t i = 0; i < seq.size(); ++i) out << (i ? " " : "") << seq[i].abbrev;
      out << '\n';
      return true;
    }
    case Subcommand::kGrammarCheck: {
      std::ifstream in(config.inputs.front(), std::ios::binary);
      if (!in) throw Error(ErrorKind::kIo, "cannot open " + config.inputs.front().string());
      grammar::MembershipOptions options;
      options.repetition_cap = config.repetition_cap;
      bool all = true;
      std::string line;
      while (std::getline(in, line)) {
        std::istringstream words(line);
        std::vector<std::string> abbrevs{std::istream_iterator<std::string>(words), {}};
        if (abbrevs.empty() || abbrevs.front().starts_with('#')) continue;
        const auto result = grammar::check_membership(g, abbrevs, options);
        all = all && result.consistent;
        out << (result.consistent ? "consistent" : "inconsistent: " + result.diagnostic) << '\n';
      }
      return all;
    }
    default:
      throw Error(ErrorKind::kInvalidArgument, "not a grammar subcommand");
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Story grammar semantic matching: segment, label, match and report"};
  app.require_subcommand(1);
  RunConfig config;

  std::string in_path;
  std::string out_path;
  std::string mode = "prose";
  std::string strip_rules;

  auto* segment = app.add_subcommand("segment", "Split a text file into passages (JSON Lines)");
  segment->add_option("--mode", mode, "prose or poetry")->check(CLI::IsMember({"prose", "poetry"}));
  segment->add_option("--strip-rules", strip_rules, "Cleanup rule file");
  segment->add_option("--doc-id", config.doc_id, "Document id (default: input file stem)");
  segment->add_option("IN", in_path)->required();
  segment->add_option("OUT", out_path)->required();

  std::string labeler_spec = "builtin:";
  double timeout_s = 120;
  std::size_t batch_size = 256;
  auto* label = app.add_subcommand("label", "Attach story-element labels to passages");
  label->add_option("--labeler", labeler_spec, "builtin:LEX | external:CMD | file:PATH")
      ->required();
  label->add_option("--timeout", timeout_s, "External labeler timeout per batch, seconds")
      ->check(CLI::PositiveNumber);
  label->add_option("--batch-size", batch_size, "External labeler batch size")
      ->check(CLI::PositiveNumber);
  label->add_option("IN", in_path)->required();
  label->add_option("OUT", out_path)->required();

  std::string src_path;
  std::string tgt_path;
  std::string format = "tsv";
  auto* match = app.add_subcommand("match", "Score every source x target passage pair");
  match->add_option("--theta", config.theta, "Match threshold")->required();
  match->add_flag("--exact", config.exact, "Compute every distance instead of capping at theta");
  match->add_option("--workers", config.workers, "Worker threads")->check(CLI::PositiveNumber);
  match->add_option("--format", format, "tsv or jsonl")->check(CLI::IsMember({"tsv", "jsonl"}));
  match->add_flag("--exclude-empty", config.exclude_empty,
                  "Do not count pairs of two empty label sequences as matches");
  match->add_option("SRC", src_path)->required();
  match->add_option("TGT", tgt_path)->required();
  match->add_option("OUT", out_path)->required();

  std::string scores_path;
  auto* report = app.add_subcommand("report", "Print matched passage pairs");
  report->add_option("--theta", config.theta, "Match threshold")->required();
  report->add_option("SCORES", scores_path)->required();
  report->add_option("SRC_PASSAGES", src_path)->required();
  report->add_option("TGT_PASSAGES", tgt_path)->required();

  auto* grammar_cmd = app.add_subcommand("grammar", "Inspect the story grammar");
  grammar_cmd->require_subcommand(1);
  auto* dump = grammar_cmd->add_subcommand("dump", "Print labels and productions");
  auto* gen = grammar_cmd->add_subcommand("gen", "Generate a label sequence");
  gen->add_option("--seed", config.seed)->required();
  gen->add_option("--max-events", config.limits.max_events)->check(CLI::PositiveNumber);
  gen->add_option("--max-triplets", config.limits.max_triplets)->check(CLI::PositiveNumber);
  gen->add_option("--max-repeat", config.limits.max_repeat)->check(CLI::PositiveNumber);
  std::string check_path;
  auto* check = grammar_cmd->add_subcommand("check", "Check label sequences, one per line");
  check->add_option("--cap", config.repetition_cap, "Repetition cap")->check(CLI::PositiveNumber);
  check->add_option("FILE", check_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << to_string(ErrorKind::kInvalidArgument) << ": " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (segment->parsed()) {
      config.subcommand = Subcommand::kSegment;
      config.mode = corpus::parse_mode(mode);
      if (!strip_rules.empty()) config.strip_rules = strip_rules;
      config.inputs = {in_path};
      config.output = out_path;
      cmd_segment(config, err);
    } else if (label->parsed()) {
      config.subcommand = Subcommand::kLabel;
      config.labeler = labeler::parse_labeler_spec(labeler_spec);
      if (auto* ext = std::get_if<labeler::ExternalProcessSpec>(&config.labeler)) {
        ext->timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000));
        ext->batch_size = batch_size;
      }
      config.inputs = {in_path};
      config.output = out_path;
      cmd_label(config, err);
    } else if (match->parsed()) {
      config.subcommand = Subcommand::kMatch;
      config.format = format == "jsonl" ? matcher::ScoreFormat::kJsonl : matcher::ScoreFormat::kTsv;
      config.inputs = {src_path, tgt_path};
      config.output = out_path;
      cmd_match(config, err);
    } else if (report->parsed()) {
      config.subcommand = Subcommand::kReport;
      config.inputs = {scores_path, src_path, tgt_path};
      cmd_report(config, out);
    } else if (dump->parsed()) {
      config.subcommand = Subcommand::kGrammarDump;
      cmd_grammar(config, out);
    } else if (gen->parsed()) {
      config.subcommand = Subcommand::kGrammarGen;
      cmd_grammar(config, out);
    } else if (check->parsed()) {
      config.subcommand = Subcommand::kGrammarCheck;
      config.inputs = {check_path};
      if (!cmd_grammar(config, out)) return 1;
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: Internal: " << one_line(e.what()) << '\n';
    return 1;
  }
  out.flush();
  return 0;
}

}  // namespace sgsm::cli
