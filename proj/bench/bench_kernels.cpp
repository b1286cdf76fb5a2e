#include "censaudit/kernels/kernels.hpp"
#include "censaudit/rng.hpp"

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

namespace {

using namespace censaudit;

const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> v{
      "what", "happened", "in", "china", "taiwan", "why", "is", "the", "government", "censor", "tiananmen",
      "square", "protest", "1989", "hong", "kong", "xinjiang", "people", "say", "about", "history", "news",
      "winnie", "pooh", "ban", "leader", "policy", "party", "how", "did", "media", "report", "students"};
  return v;
}

std::vector<std::string> make_texts(size_t n, uint64_t seed) {
  SeededRng rng(seed);
  std::vector<std::string> out;
  out.reserve(n);
  const auto& v = vocabulary();
  for (size_t i = 0; i < n; ++i) {
    if (i > 0 && rng.below(5) == 0) {
      out.push_back(out[rng.below(i)] + " ??");
      continue;
    }
    const size_t len = 5 + rng.below(25);
    std::string s;
    for (size_t k = 0; k < len; ++k) {
      if (k) s += ' ';
      s += v[rng.below(v.size())];
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Completion> make_completions(size_t n, uint64_t seed) {
  SeededRng rng(seed);
  std::vector<Completion> out;
  const char* finals[] = {"I am sorry, I cannot answer that question.",
                          "Taiwan has always been an inalienable part of China's sacred territory.",
                          "The protests began in April 1989 after the death of Hu Yaobang."};
  for (size_t i = 0; i < n; ++i) {
    Completion c;
    c.final = finals[rng.below(3)];
    if (rng.below(2)) c.reasoning = "Okay, the user is asking about a historical event and I should recall the facts.";
    c.raw = c.final;
    out.push_back(std::move(c));
  }
  return out;
}

void BM_dedup_parallel(benchmark::State& state) {
  auto texts = make_texts(static_cast<size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::near_duplicate_drop_mask(texts));
}

void BM_dedup_serial(benchmark::State& state) {
  auto texts = make_texts(static_cast<size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::near_duplicate_drop_mask(texts));
}

void BM_keywords_parallel(benchmark::State& state) {
  auto texts = make_texts(static_cast<size_t>(state.range(0)), 11);
  std::vector<std::string> kw{"Tiananmen", "Taiwan", "Xinjiang", "CCP", "Winnie"};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::keyword_mask(texts, kw));
}

void BM_keywords_serial(benchmark::State& state) {
  auto texts = make_texts(static_cast<size_t>(state.range(0)), 11);
  std::vector<std::string> kw{"Tiananmen", "Taiwan", "Xinjiang", "CCP", "Winnie"};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::keyword_mask(texts, kw));
}

void BM_classify_parallel(benchmark::State& state) {
  auto cs = make_completions(static_cast<size_t>(state.range(0)), 3);
  auto lex = classifier::Lexicons::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::classify_all(cs, lex));
}

void BM_classify_serial(benchmark::State& state) {
  auto cs = make_completions(static_cast<size_t>(state.range(0)), 3);
  auto lex = classifier::Lexicons::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::classify_all(cs, lex));
}

}  // namespace

BENCHMARK(BM_dedup_parallel)->Arg(500)->Arg(2000);
BENCHMARK(BM_dedup_serial)->Arg(500)->Arg(2000);
BENCHMARK(BM_keywords_parallel)->Arg(10000);
BENCHMARK(BM_keywords_serial)->Arg(10000);
BENCHMARK(BM_classify_parallel)->Arg(10000);
BENCHMARK(BM_classify_serial)->Arg(10000);

BENCHMARK_MAIN();
