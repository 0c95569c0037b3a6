#include "generators.hpp"

#include <algorithm>

namespace testsupport {

namespace {

const std::vector<std::string> kTextPool = {
    "kitabu", "ŋoma",  "ñandú",   "über",  "mtoto", "a\"quoted\"", "x<y>&z", "50%",   "c,d",      "semi;colon",
    "back\\slash", "日本", "café",   "ʔaʔa",  "#hash", "*star*",     "[link]", "tab\tin", "'single'", "{brace}",
    "maji",   "watu",  "nyumba",  "chakula"};

const std::vector<std::string> kUnits = {"a", "b", "ch", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m",
                                         "n", "ng", "ny", "o", "p", "r", "s", "sh", "t", "u", "w", "y", "z"};

const std::vector<std::string> kGrammatical = {"PL", "SG", "3SG", "PST", "FUT", "NEG", "DEF", "LOC", "1PL"};

std::string hex_id(Rng& rng) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < 32; ++i) out += digits[rng.index(16)];
  return out;
}

}  // namespace

std::string random_word(Rng& rng, std::size_t min_len, std::size_t max_len, const std::string& letters) {
  const std::size_t n = static_cast<std::size_t>(rng.range(static_cast<std::int64_t>(min_len), static_cast<std::int64_t>(max_len)));
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += letters[rng.index(letters.size())];
  return out;
}

std::string random_text(Rng& rng, std::size_t max_words) {
  const std::size_t n = 1 + rng.index(max_words);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += rng.chance(0.5) ? rng.pick(kTextPool) : random_word(rng, 2, 8);
  }
  return out;
}

std::vector<std::string> random_alphabet(Rng& rng) {
  std::vector<std::string> pool = kUnits;
  std::shuffle(pool.begin(), pool.end(), rng.engine());
  pool.resize(static_cast<std::size_t>(rng.range(5, 12)));
  // Digraphs are more interesting when their first letter is present too.
  if (rng.chance(0.7) && std::find(pool.begin(), pool.end(), "ch") == pool.end()) pool.push_back("ch");
  if (std::find(pool.begin(), pool.end(), "c") == pool.end() && rng.chance(0.5)) pool.push_back("c");
  std::shuffle(pool.begin(), pool.end(), rng.engine());
  return pool;
}

std::string random_headword(Rng& rng, const std::vector<std::string>& alphabet, bool allow_foreign) {
  const std::size_t n = 1 + rng.index(6);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (allow_foreign && rng.chance(0.08)) {
      out += rng.chance(0.5) ? "q" : "é";
    } else {
      std::string unit = rng.pick(alphabet);
      if (rng.chance(0.1)) unit[0] = static_cast<char>(unit[0] - 'a' + 'A');
      out += unit;
    }
  }
  return out;
}

life::LexicalEntry random_entry(Rng& rng, const std::string& project_id) {
  life::LexicalEntry e;
  e.id = hex_id(rng);
  e.project_id = project_id;
  e.headword = rng.chance(0.15) ? random_word(rng, 2, 6) + " " + random_word(rng, 2, 6) : random_word(rng, 2, 9);
  e.homonym_no = rng.chance(0.8) ? 1 : static_cast<int>(rng.range(2, 3));
  static const std::vector<std::string> pos = {"n", "v", "adj", "adv", "pron", "", "clf"};
  e.pos = rng.pick(pos);
  const std::size_t senses = 1 + rng.index(3);
  for (std::size_t k = 0; k < senses; ++k) {
    life::Sense s;
    s.sense_no = static_cast<int>(k) + 1;
    s.gloss = random_text(rng, 2);
    if (rng.chance(0.4)) s.definition = random_text(rng, 5);
    if (rng.chance(0.3)) s.semantic_domain = random_word(rng, 3, 8);
    for (std::size_t x = rng.index(3); x > 0; --x) s.examples.push_back({random_text(rng, 4), random_text(rng, 4)});
    e.senses.push_back(std::move(s));
  }
  for (std::size_t v = rng.index(3); v > 0; --v) e.variants.push_back(random_word(rng, 2, 8));
  e.created_at = "2024-05-01T10:00:00Z";
  e.modified_at = "2024-05-02T10:00:00Z";
  return e;
}

life::Utterance random_utterance(Rng& rng) {
  life::Utterance u;
  u.id = hex_id(rng);
  u.glossed = rng.chance(0.8);
  const std::size_t words = 1 + rng.index(5);
  for (std::size_t j = 0; j < words; ++j) {
    life::Word w;
    const std::size_t morphs = 1 + rng.index(3);
    const std::size_t root = rng.index(morphs);
    for (std::size_t k = 0; k < morphs; ++k) {
      life::Morph m;
      m.form = random_word(rng, 1, 4);
      m.type = k < root ? life::MorphType::Prefix : k > root ? life::MorphType::Suffix : life::MorphType::Root;
      m.gloss = k == root ? random_word(rng, 3, 6) : rng.pick(kGrammatical);
      w.surface += m.form;
      if (u.glossed) w.morphs.push_back(std::move(m));
    }
    if (!u.phrase.empty()) u.phrase += ' ';
    u.phrase += w.surface;
    u.words.push_back(std::move(w));
  }
  if (rng.chance(0.8)) u.translation = life::Translation{random_text(rng, 5), rng.chance(0.7) ? "en" : "fr"};
  return u;
}

life::IGTDocument random_document(Rng& rng, const std::string& project_id) {
  life::IGTDocument d;
  d.id = hex_id(rng);
  d.project_id = project_id;
  d.title = random_text(rng, 3);
  for (std::size_t i = 1 + rng.index(4); i > 0; --i) d.utterances.push_back(random_utterance(rng));
  return d;
}

life::Project test_project(const std::string& id) {
  life::Project p;
  p.id = id;
  p.name = "Test language";
  p.slug = "test-language";
  p.language_name = "Test";
  p.language_code = "tst";
  p.alphabet = {"a", "b", "ch", "d", "e", "i", "k", "m", "n", "o", "s", "t", "u"};
  p.pos_inventory = {"n", "v", "adj"};
  p.members["u-owner"] = life::Role::Owner;
  p.created_at = "2024-05-01T10:00:00Z";
  return p;
}

}  // namespace testsupport
