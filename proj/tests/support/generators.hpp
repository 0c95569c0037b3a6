#pragma once

// Seeded random generators for property tests. Everything is a pure
// function of the Rng state so failures reproduce from the seed.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "life/model.hpp"

namespace testsupport {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [lo, hi].
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(range(0, static_cast<std::int64_t>(n) - 1)); }
  bool chance(double p) { return std::bernoulli_distribution(p)(engine_); }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[index(v.size())];
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Lowercase ASCII word from the given letters.
std::string random_word(Rng& rng, std::size_t min_len, std::size_t max_len, const std::string& letters = "abcdefghiklmnoprstuwy");

// Vernacular-looking text that mixes ASCII, accented letters and the
// characters SFM, CSV, Turtle and HTML treat specially.
std::string random_text(Rng& rng, std::size_t max_words);

// An alphabet of 5..12 units drawn from single letters and digraphs, in
// random order.
std::vector<std::string> random_alphabet(Rng& rng);

// Headword built from alphabet units, occasionally with a character
// outside the alphabet.
std::string random_headword(Rng& rng, const std::vector<std::string>& alphabet, bool allow_foreign);

life::LexicalEntry random_entry(Rng& rng, const std::string& project_id);
life::Utterance random_utterance(Rng& rng);
life::IGTDocument random_document(Rng& rng, const std::string& project_id);

// A project suitable for validate_entry on random_entry output.
life::Project test_project(const std::string& id = "p1");

}  // namespace testsupport
