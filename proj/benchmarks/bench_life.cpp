#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "life/collation.hpp"
#include "life/glosser.hpp"
#include "life/ingest.hpp"
#include "life/model.hpp"
#include "life/ontolex.hpp"
#include "life/rdf.hpp"

using namespace life;

namespace {

std::string word(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
  static const std::string letters = "abdeghikmnostuwy";
  std::uniform_int_distribution<std::size_t> len(min_len, max_len), pick(0, letters.size() - 1);
  std::string w;
  for (std::size_t n = len(rng); n > 0; --n) w += letters[pick(rng)];
  return w;
}

std::string sfm_lexicon(std::size_t records) {
  std::mt19937_64 rng(7);
  std::string out;
  for (std::size_t i = 0; i < records; ++i) {
    out += "\\lx " + word(rng, 3, 9) + "\n\\ps n\n\\sn\n\\ge " + word(rng, 3, 7) + "\n\\de " + word(rng, 4, 8) + " " +
           word(rng, 2, 6) + "\n\\xv " + word(rng, 3, 9) + " " + word(rng, 3, 9) + "\n\\xe " + word(rng, 3, 9) +
           "\n\\dt 2024-05-01\n\n";
  }
  return out;
}

gloss::GlossModel bantu_model() {
  std::mt19937_64 rng(11);
  const std::vector<std::string> prefixes = {"ki", "vi", "m", "wa", "mi", "ku"};
  const std::vector<std::string> suffixes = {"ni", "a", "eni", "wa"};
  std::vector<Utterance> corpus;
  for (int i = 0; i < 400; ++i) {
    Utterance u;
    u.id = new_id();
    u.glossed = true;
    for (int k = 0; k < 4; ++k) {
      Word w;
      const std::string p = prefixes[rng() % prefixes.size()], r = word(rng, 3, 5), s = suffixes[rng() % suffixes.size()];
      w.surface = p + r + s;
      w.morphs = {{p, "CL", MorphType::Prefix}, {r, "root-" + r, MorphType::Root}, {s, "SFX", MorphType::Suffix}};
      if (!u.phrase.empty()) u.phrase += ' ';
      u.phrase += w.surface;
      u.words.push_back(std::move(w));
    }
    corpus.push_back(std::move(u));
  }
  return gloss::train(corpus);
}

void BM_Segment(benchmark::State& state) {
  const gloss::GlossModel model = bantu_model();
  std::mt19937_64 rng(3);
  std::vector<std::string> words;
  for (int i = 0; i < 256; ++i) words.push_back(word(rng, static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0))));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(gloss::segment(model, words[i++ % words.size()]));
}
BENCHMARK(BM_Segment)->Arg(6)->Arg(12)->Arg(24);

void BM_SfmParse(benchmark::State& state) {
  const std::string text = sfm_lexicon(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ingest::parse_sfm_lexicon(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_SfmParse)->Arg(100)->Arg(1000);

void BM_NtriplesSerialize(benchmark::State& state) {
  Project p;
  p.id = "p";
  p.slug = "bench";
  p.language_code = "swh";
  const auto ctx = linked::make_context(p, "https://life.example.org/");
  const auto entries = ingest::parse_sfm_lexicon(sfm_lexicon(static_cast<std::size_t>(state.range(0)))).entries;
  const rdf::Graph g = linked::lexicon_to_ontolex(entries, ctx);
  for (auto _ : state) benchmark::DoNotOptimize(rdf::serialize_ntriples(g));
  state.counters["triples"] = static_cast<double>(g.size());
}
BENCHMARK(BM_NtriplesSerialize)->Arg(100)->Arg(1000);

void BM_CollationSort(benchmark::State& state) {
  const dict::Collator collator({"a", "b", "ch", "d", "e", "g", "h", "i", "k", "m", "n", "ng'", "ny", "o", "s", "t", "u", "w", "y"});
  std::mt19937_64 rng(5);
  std::vector<std::string> words;
  for (std::int64_t i = 0; i < state.range(0); ++i) words.push_back(word(rng, 2, 10));
  for (auto _ : state) {
    auto copy = words;
    std::sort(copy.begin(), copy.end(), collator);
    benchmark::DoNotOptimize(copy.data());
  }
}
BENCHMARK(BM_CollationSort)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
