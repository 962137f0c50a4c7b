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


#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sgsm/grammar.hpp"
#include "sgsm/matcher.hpp"

namespace {

using sgsm::grammar::LabelId;
using sgsm::matcher::LabelSequence;

// Lengths are uniform on [0, 16] (mean 8), labels uniform over the registry.
std::vector<LabelSequence> corpus(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> len(0, 16);
  std::uniform_int_distribution<int> sym(0, 27);
  std::vector<LabelSequence> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].doc_id = "d";
    out[i].index = i;
    out[i].seq.resize(len(rng));
    for (auto& x : out[i].seq) x = static_cast<LabelId>(sym(rng));
  }
  return out;
}

void BM_Levenshtein(benchmark::State& state) {
  const auto seqs = corpus(1024, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sgsm::matcher::levenshtein(seqs[i % 1024].seq, seqs[(i * 7 + 3) % 1024].seq));
    ++i;
  }
}
BENCHMARK(BM_Levenshtein);

void BM_LevenshteinCapped(benchmark::State& state) {
  const auto seqs = corpus(1024, 1);
  const auto cap = static_cast<std::size_t>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sgsm::matcher::levenshtein_capped(
        seqs[i % 1024].seq, seqs[(i * 7 + 3) % 1024].seq, cap));
    ++i;
  }
}
BENCHMARK(BM_LevenshteinCapped)->Arg(0)->Arg(2)->Arg(5);

void BM_BitParallel(benchmark::State& state) {
  const auto seqs = corpus(1024, 1);
  std::vector<sgsm::matcher::BitParallelPattern> patterns;
  for (const auto& s : seqs) patterns.emplace_back(s.seq);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(patterns[i % 1024].distance(seqs[(i * 7 + 3) % 1024].seq));
    ++i;
  }
}
BENCHMARK(BM_BitParallel);

// One document pair at the size of the smallest experiment (943 x 2,585).
void BM_MatchAll(benchmark::State& state) {
  const auto src = corpus(943, 2);
  const auto tgt = corpus(2585, 3);
  sgsm::matcher::MatchOptions options;
  options.mode = state.range(0) < 0 ? sgsm::matcher::MatchMode::exact()
                                    : sgsm::matcher::MatchMode::capped(static_cast<std::uint32_t>(state.range(0)));
  options.workers = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    std::uint64_t matched = 0;
    sgsm::matcher::match_all(src, tgt, options, [&](std::span<const sgsm::matcher::Score> block) {
      for (const auto& s : block) matched += s.matches({2});
    });
    benchmark::DoNotOptimize(matched);
  }
  state.SetItemsProcessed(state.iterations() * 943 * 2585);
}
BENCHMARK(BM_MatchAll)->Args({2, 1})->Args({-1, 1})->Args({2, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
