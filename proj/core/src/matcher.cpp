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

#include "sgsm/matcher.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <limits>
#include <ostream>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sgsm/error.hpp"

namespace sgsm::matcher {
namespace {

constexpr std::size_t kInfinity = std::numeric_limits<std::size_t>::max() / 4;

// Target count per worker task; keeps per-wave buffers around a few MB.
constexpr std::size_t kScoresPerTask = 1 << 16;

std::span<const LabelId> view(const LabelSequence& s) { return s.seq; }

const std::string& doc_of(std::span<const LabelSequence> seqs, const char* side) {
  static const std::string empty;
  if (seqs.empty()) return empty;
  for (const auto& s : seqs) {
    if (s.doc_id != seqs.front().doc_id) {
      throw Error(ErrorKind::kInvalidArgument, std::string(side) + " sequences span documents '" +
                                                   seqs.front().doc_id + "' and '" + s.doc_id + "'");
    }
  }
  return seqs.front().doc_id;
}

/// Per-target precomputation shared by all workers.
struct Targets {
  std::span<const LabelSequence> seqs;
  std::vector<std::optional<BitParallelPattern>> patterns;

  explicit Targets(std::span<const LabelSequence> t) : seqs(t) {
    patterns.reserve(t.size());
    for (const auto& s : t) {
      if (s.seq.size() <= BitParallelPattern::kMaxLength) {
        patterns.emplace_back(std::in_place, s.seq);
      } else {
        patterns.emplace_back();
      }
    }
  }
};

std::optional<std::uint32_t> narrow(std::optional<std::size_t> d) {
  if (!d) return std::nullopt;
  return static_cast<std::uint32_t>(*d);
}

void compute_row(const LabelSequence& source, std::uint32_t row, const Targets& targets,
                 const MatchMode& mode, Score* out) {
  const std::span<const LabelId> a = source.seq;
  std::optional<BitParallelPattern> own;
  if (a.size() <= BitParallelPattern::kMaxLength) own.emplace(a);

  for (std::size_t j = 0; j < targets.seqs.size(); ++j) {
    const std::span<const LabelId> b = targets.seqs[j].seq;
    Score& s = out[j];
    s.source = row;
    s.target = static_cast<std::uint32_t>(j);
    if (mode.cap) {
      const std::size_t cap = *mode.cap;
      const std::size_t diff = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
      if (diff > cap) {
        s.value.reset();
      } else if (own) {
        s.value = narrow(own->distance_capped(b, cap));
      } else if (targets.patterns[j]) {
        s.value = narrow(targets.patterns[j]->distance_capped(a, cap));
      } else {
        s.value = narrow(levenshtein_capped(a, b, cap));
      }
    } else {
      std::size_t d;
      if (own) {
        d = own->distance(b);
      } else if (targets.patterns[j]) {
        d = targets.patterns[j]->distance(a);
      } else {
        d = levenshtein(a, b);
      }
      s.value = static_cast<std::uint32_t>(d);
    }
  }
}

// DP rows live on the stack up to this many cells.
constexpr std::size_t kStackCells = 128;

// Calls fn with `count` writable rows of `cells` cells each.
template <std::size_t Rows, class Fn>
auto with_rows(std::size_t cells, Fn&& fn) {
  if (cells <= kStackCells) {
    std::array<std::array<std::size_t, kStackCells>, Rows> buf;
    return [&]<std::size_t... I>(std::index_sequence<I...>) {
      return fn(std::span<std::size_t>(buf[I].data(), cells)...);
    }(std::make_index_sequence<Rows>{});
  }
  std::array<std::vector<std::size_t>, Rows> heap;
  for (auto& v : heap) v.resize(cells);
  return [&]<std::size_t... I>(std::index_sequence<I...>) {
    return fn(std::span<std::size_t>(heap[I])...);
  }(std::make_index_sequence<Rows>{});
}

void append_uint(std::string& out, std::uint64_t v) {
  char buf[24];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

}  // namespace

std::size_t levenshtein(std::span<const LabelId> a, std::span<const LabelId> b) {
  // Shared prefix and suffix never change the distance.
  while (!a.empty() && !b.empty() && a.front() == b.front()) {
    a = a.subspan(1);
    b = b.subspan(1);
  }
  while (!a.empty() && !b.empty() && a.back() == b.back()) {
    a = a.first(a.size() - 1);
    b = b.first(b.size() - 1);
  }
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return a.size();
  // b is the shorter side; one row of |b|+1 cells.
  std::array<std::size_t, kStackCells> stack_row;
  std::vector<std::size_t> heap_row;
  std::size_t* row = stack_row.data();
  if (b.size() + 1 > kStackCells) {
    heap_row.resize(b.size() + 1);
    row = heap_row.data();
  }
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    const LabelId ai = a[i - 1];
    std::size_t diag = row[0];
    std::size_t left = i;
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (ai != b[j - 1]);
      left = std::min(sub, std::min(up, left) + 1);
      row[j] = left;
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t levenshtein(const LabelSequence& a, const LabelSequence& b) {
  return levenshtein(view(a), view(b));
}

std::optional<std::size_t> levenshtein_capped(std::span<const LabelId> a,
                                              std::span<const LabelId> b, std::size_t cap) {
  if (a.size() > b.size()) std::swap(a, b);
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (m - n > cap) return std::nullopt;
  if (n == 0) return m;

  // Columns index a, rows index b; only cells with |i - j| <= cap are live.
  return with_rows<2>(n + 2, [&](std::span<std::size_t> prev,
                                 std::span<std::size_t> cur) -> std::optional<std::size_t> {
    std::fill(prev.begin(), prev.end(), kInfinity);
    std::fill(cur.begin(), cur.end(), kInfinity);
    for (std::size_t i = 0; i <= std::min(n, cap); ++i) prev[i] = i;

    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t lo = j > cap ? j - cap : 1;
      const std::size_t hi = std::min(n, j + cap);
      cur[lo - 1] = lo == 1 && j <= cap ? j : kInfinity;
      std::size_t row_min = cur[lo - 1];
      const LabelId bj = b[j - 1];
      for (std::size_t i = lo; i <= hi; ++i) {
        const std::size_t cost = a[i - 1] == bj ? 0 : 1;
        const std::size_t v = std::min({prev[i - 1] + cost, prev[i] + 1, cur[i - 1] + 1});
        cur[i] = std::min(v, kInfinity);
        row_min = std::min(row_min, cur[i]);
      }
      if (hi < n) cur[hi + 1] = kInfinity;
      if (row_min > cap) return std::nullopt;
      std::swap(prev, cur);
    }
    if (prev[n] > cap) return std::nullopt;
    return prev[n];
  });
}

std::optional<std::size_t> levenshtein_capped(const LabelSequence& a, const LabelSequence& b,
                                              std::size_t cap) {
  return levenshtein_capped(view(a), view(b), cap);
}

BitParallelPattern::BitParallelPattern(std::span<const LabelId> pattern)
    : length_(pattern.size()) {
  if (pattern.size() > kMaxLength) {
    throw Error(ErrorKind::kInvalidArgument, "bit-parallel pattern longer than 64 labels");
  }
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] >= peq_.size()) {
      throw Error(ErrorKind::kUnknownLabel, "label id out of range in pattern");
    }
    peq_[pattern[i]] |= std::uint64_t{1} << i;
  }
}

std::size_t BitParallelPattern::distance(std::span<const LabelId> text) const noexcept {
  if (length_ == 0) return text.size();
  const std::uint64_t last = std::uint64_t{1} << (length_ - 1);
  std::uint64_t pv = ~std::uint64_t{0};
  std::uint64_t mv = 0;
  std::size_t score = length_;
  for (LabelId c : text) {
    const std::uint64_t eq = c < peq_.size() ? peq_[c] : 0;
    const std::uint64_t xv = eq | mv;
    const std::uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
    std::uint64_t ph = mv | ~(xh | pv);
    std::uint64_t mh = pv & xh;
    if (ph & last) ++score;
    if (mh & last) --score;
    ph = (ph << 1) | 1;
    mh <<= 1;
    pv = mh | ~(xv | ph);
    mv = ph & xv;
  }
  return score;
}

std::optional<std::size_t> BitParallelPattern::distance_capped(std::span<const LabelId> text,
                                                               std::size_t cap) const noexcept {
  if (length_ == 0) {
    if (text.size() > cap) return std::nullopt;
    return text.size();
  }
  const std::uint64_t last = std::uint64_t{1} << (length_ - 1);
  std::uint64_t pv = ~std::uint64_t{0};
  std::uint64_t mv = 0;
  std::size_t score = length_;
  std::size_t remaining = text.size();
  for (LabelId c : text) {
    const std::uint64_t eq = c < peq_.size() ? peq_[c] : 0;
    const std::uint64_t xv = eq | mv;
    const std::uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
    std::uint64_t ph = mv | ~(xh | pv);
    std::uint64_t mh = pv & xh;
    if (ph & last) ++score;
    if (mh & last) --score;
    ph = (ph << 1) | 1;
    mh <<= 1;
    pv = mh | ~(xv | ph);
    mv = ph & xv;
    // Each remaining column moves the last-row score by at most one.
    if (score > cap + --remaining) return std::nullopt;
  }
  if (score > cap) return std::nullopt;
  return score;
}

MatchSummary match_all(std::span<const LabelSequence> src, std::span<const LabelSequence> tgt,
                       const MatchOptions& options, const ScoreSink& sink) {
  if (options.workers == 0) throw Error(ErrorKind::kInvalidArgument, "workers must be >= 1");
  if (src.size() > std::numeric_limits<std::uint32_t>::max() ||
      tgt.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::kInvalidArgument, "too many sequences for one run");
  }
  MatchSummary summary;
  summary.source_doc = doc_of(src, "source");
  summary.target_doc = doc_of(tgt, "target");
  summary.mode = options.mode;
  summary.total = comparison_count(src.size(), tgt.size());
  if (src.empty() || tgt.empty()) return summary;

  const Targets targets(tgt);
  const std::size_t m = tgt.size();
  const std::size_t rows_per_task = std::max<std::size_t>(1, kScoresPerTask / m);
  const std::size_t workers = std::min(options.workers, (src.size() + rows_per_task - 1) / rows_per_task);

  std::vector<std::vector<Score>> buffers(workers);
  for (auto& b : buffers) b.resize(rows_per_task * m);

  auto run_task = [&](std::size_t worker, std::size_t first_row) {
    const std::size_t rows = std::min(rows_per_task, src.size() - first_row);
    for (std::size_t r = 0; r < rows; ++r) {
      compute_row(src[first_row + r], static_cast<std::uint32_t>(first_row + r), targets,
                  options.mode, buffers[worker].data() + r * m);
    }
    return rows;
  };

  const std::size_t wave_rows = rows_per_task * workers;
  for (std::size_t wave = 0; wave < src.size(); wave += wave_rows) {
    std::vector<std::size_t> produced(workers, 0);
    if (workers == 1) {
      produced[0] = run_task(0, wave);
    } else {
      std::vector<std::jthread> threads;
      threads.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t first = wave + w * rows_per_task;
        if (first >= src.size()) break;
        threads.emplace_back([&, w, first] { produced[w] = run_task(w, first); });
      }
    }
    for (std::size_t w = 0; w < workers; ++w) {
      if (produced[w] > 0) sink(std::span<const Score>(buffers[w].data(), produced[w] * m));
    }
  }
  return summary;
}

MatchRun match_all(std::span<const LabelSequence> src, std::span<const LabelSequence> tgt,
                   const MatchOptions& options) {
  MatchRun run;
  run.scores.reserve(src.size() * tgt.size());
  run.summary = match_all(src, tgt, options, [&](std::span<const Score> block) {
    run.scores.insert(run.scores.end(), block.begin(), block.end());
  });
  return run;
}

void check_threshold(const MatchMode& mode, Threshold theta) {
  if (mode.cap && theta.value > *mode.cap) {
    throw Error(ErrorKind::kThresholdAboveCap,
                "threshold " + std::to_string(theta.value) + " exceeds the run's cap " +
                    std::to_string(*mode.cap));
  }
}

std::vector<Score> filter_threshold(const MatchRun& run, Threshold theta) {
  check_threshold(run.summary.mode, theta);
  std::vector<Score> out;
  std::copy_if(run.scores.begin(), run.scores.end(), std::back_inserter(out),
               [&](const Score& s) { return s.matches(theta); });
  return out;
}

std::uint64_t comparison_count(std::uint64_t n_src, std::uint64_t n_tgt) noexcept {
  return n_src * n_tgt;
}

// --- scores file ----------------------------------------------------------------

ScoreWriter::ScoreWriter(std::ostream& out, std::span<const LabelSequence> src,
                         std::span<const LabelSequence> tgt, MatchMode mode, ScoreFormat format)
    : out_(out), src_(src), tgt_(tgt), mode_(mode), format_(format) {
  auto check = [](std::span<const LabelSequence> seqs) {
    for (const auto& s : seqs) {
      if (s.doc_id.find_first_of("\t\n\r") != std::string::npos) {
        throw Error(ErrorKind::kInvalidArgument,
                    "doc_id '" + s.doc_id + "' contains a tab or newline");
      }
    }
  };
  if (format_ == ScoreFormat::kTsv) {
    check(src_);
    check(tgt_);
  }
  buffer_.reserve(1 << 20);
}

ScoreWriter::~ScoreWriter() {
  try {
    flush();
  } catch (...) {
  }
}

void ScoreWriter::write(std::span<const Score> block) {
  for (const Score& s : block) {
    const LabelSequence& a = src_[s.source];
    const LabelSequence& b = tgt_[s.target];
    if (format_ == ScoreFormat::kTsv) {
      buffer_ += a.doc_id;
      buffer_ += '\t';
      append_uint(buffer_, a.index);
      buffer_ += '\t';
      buffer_ += b.doc_id;
      buffer_ += '\t';
      append_uint(buffer_, b.index);
      buffer_ += '\t';
      if (s.value) {
        append_uint(buffer_, *s.value);
      } else {
        buffer_ += '>';
        append_uint(buffer_, mode_.cap.value_or(0));
      }
    } else {
      nlohmann::ordered_json j;
      j["src_doc"] = a.doc_id;
      j["src_index"] = a.index;
      j["tgt_doc"] = b.doc_id;
      j["tgt_index"] = b.index;
      if (s.value) {
        j["score"] = *s.value;
      } else {
        j["score"] = ">" + std::to_string(mode_.cap.value_or(0));
      }
      buffer_ += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    }
    buffer_ += '\n';
    if (buffer_.size() > (1u << 20)) flush();
  }
}

void ScoreWriter::flush() {
  if (!buffer_.empty()) {
    out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    buffer_.clear();
  }
  if (!out_) throw Error(ErrorKind::kIo, "failed writing scores");
}

ScoreRecord parse_score_line(std::string_view line, std::size_t line_no) {
  const std::string where = line_no > 0 ? "scores line " + std::to_string(line_no) + ": " : "";
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  for (std::size_t tab; (tab = line.find('\t', pos)) != std::string_view::npos; pos = tab + 1) {
    fields.push_back(line.substr(pos, tab - pos));
  }
  fields.push_back(line.substr(pos));
  if (fields.size() != 5) {
    throw Error(ErrorKind::kParseError, where + "expected 5 tab-separated fields");
  }
  auto number = [&](std::string_view s, const char* what) {
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty()) {
      throw Error(ErrorKind::kParseError, where + "bad " + what + " '" + std::string(s) + "'");
    }
    return v;
  };
  ScoreRecord r;
  r.source_doc = fields[0];
  r.source_index = number(fields[1], "source index");
  r.target_doc = fields[2];
  r.target_index = number(fields[3], "target index");
  std::string_view score = fields[4];
  if (score.starts_with('>')) {
    r.cap = static_cast<std::uint32_t>(number(score.substr(1), "cap"));
  } else {
    r.value = static_cast<std::uint32_t>(number(score, "score"));
  }
  return r;
}

}  // namespace sgsm::matcher
