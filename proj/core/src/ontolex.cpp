#include "life/ontolex.hpp"

#include <algorithm>

#include "life/error.hpp"
#include "life/ingest.hpp"
#include "life/text.hpp"

namespace life::linked {

namespace vocab {
std::string rdf(std::string_view local) { return std::string(kRdf) + std::string(local); }
std::string ontolex(std::string_view local) { return std::string(kOntolex) + std::string(local); }
std::string lexinfo(std::string_view local) { return std::string(kLexinfo) + std::string(local); }
std::string skos(std::string_view local) { return std::string(kSkos) + std::string(local); }
std::string ligt(std::string_view local) { return std::string(kLigt) + std::string(local); }
std::string xsd(std::string_view local) { return std::string(kXsd) + std::string(local); }
}  // namespace vocab

namespace {

using rdf::Graph;
using rdf::iri;

bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return text::is_space(c); });
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> default_pos_map() {
  const std::pair<const char*, const char*> table[] = {
      {"n", "noun"},           {"noun", "noun"},
      {"v", "verb"},           {"verb", "verb"},
      {"adj", "adjective"},    {"a", "adjective"},
      {"adv", "adverb"},       {"pron", "pronoun"},
      {"pro", "pronoun"},      {"prep", "preposition"},
      {"postp", "postposition"}, {"conj", "conjunction"},
      {"num", "numeral"},      {"det", "determiner"},
      {"interj", "interjection"}, {"intj", "interjection"},
      {"part", "particle"},    {"prt", "particle"},
      {"clf", "classifier"},   {"cls", "classifier"},
  };
  std::map<std::string, std::string> out;
  for (const auto& [label, local] : table) out.emplace(label, vocab::lexinfo(local));
  return out;
}

std::string MappingContext::ligt_ext(std::string_view local) const {
  return base_iri + std::string(vocab::kLigtExtPath) + std::string(local);
}

MappingContext make_context(const Project& project, std::string base_iri) {
  if (!rdf::is_absolute_iri(base_iri) || base_iri.back() != '/') {
    throw Error(ErrorCode::InvalidIri, "base IRI must be absolute and end with '/': " + base_iri);
  }
  MappingContext ctx;
  ctx.base_iri = std::move(base_iri);
  ctx.project_slug = project.slug;
  ctx.lang_tag = ascii_lower(project.language_code);
  return ctx;
}

std::vector<rdf::Prefix> prefix_table(const MappingContext& ctx) {
  return {
      {"rdf", std::string(vocab::kRdf)},         {"rdfs", std::string(vocab::kRdfs)},
      {"ontolex", std::string(vocab::kOntolex)}, {"lexinfo", std::string(vocab::kLexinfo)},
      {"skos", std::string(vocab::kSkos)},       {"ligt", std::string(vocab::kLigt)},
      {"dct", std::string(vocab::kDct)},         {"xsd", std::string(vocab::kXsd)},
      {"ligt-ext", ctx.ligt_ext("")},            {"base", ctx.base_iri},
  };
}

std::string entry_iri(const MappingContext& ctx, std::string_view entry_id) {
  return ctx.base_iri + "lexicon/" + ctx.project_slug + "/" + std::string(entry_id);
}

std::string document_iri(const MappingContext& ctx, std::string_view doc_id) {
  return ctx.base_iri + "texts/" + ctx.project_slug + "/" + std::string(doc_id);
}

Graph entry_to_ontolex(const LexicalEntry& entry, const MappingContext& ctx, Warnings* warnings) {
  Graph g;
  const auto type = iri(vocab::rdf("type"));
  const std::string e = entry_iri(ctx, entry.id);
  const std::string f = e + "#form";

  g.insert(iri(e), type, iri(vocab::ontolex("LexicalEntry")));
  g.insert(iri(e), type, iri(vocab::ontolex(has_space(entry.headword) ? "MultiwordExpression" : "Word")));
  g.insert(iri(e), iri(vocab::ontolex("canonicalForm")), iri(f));
  g.insert(iri(f), type, iri(vocab::ontolex("Form")));
  g.insert(iri(f), iri(vocab::ontolex("writtenRep")), rdf::lang_literal(entry.headword, ctx.lang_tag));

  if (!entry.pos.empty()) {
    if (auto it = ctx.pos_map.find(text::lower(entry.pos)); it != ctx.pos_map.end()) {
      g.insert(iri(e), iri(vocab::lexinfo("partOfSpeech")), iri(it->second));
    } else if (warnings) {
      warnings->push_back("entry '" + entry.headword + "' (" + entry.id + "): part of speech '" + entry.pos +
                          "' has no lexinfo mapping");
    }
  }

  for (std::size_t k = 0; k < entry.senses.size(); ++k) {
    const Sense& s = entry.senses[k];
    const std::string sk = e + "#sense-" + std::to_string(k + 1);
    g.insert(iri(e), iri(vocab::ontolex("sense")), iri(sk));
    g.insert(iri(sk), type, iri(vocab::ontolex("LexicalSense")));
    const std::string& def = s.definition && !s.definition->empty() ? *s.definition : s.gloss;
    g.insert(iri(sk), iri(vocab::skos("definition")), rdf::lang_literal(def, ctx.metalanguage));
  }
  return g;
}

Graph igt_to_ligt(const IGTDocument& doc, const MappingContext& ctx) {
  Graph g;
  const auto type = iri(vocab::rdf("type"));
  const auto value = iri(vocab::rdf("value"));
  const auto index = iri(ctx.ligt_ext("index"));
  const std::string d = document_iri(ctx, doc.id);
  g.insert(iri(d), type, iri(vocab::ligt("Document")));

  for (std::size_t i = 0; i < doc.utterances.size(); ++i) {
    const Utterance& utt = doc.utterances[i];
    const std::string u = d + "#u-" + std::to_string(i + 1);
    g.insert(iri(d), iri(vocab::ligt("hasUtterances")), iri(u));
    g.insert(iri(u), type, iri(vocab::ligt("Utterance")));
    g.insert(iri(u), index, rdf::integer_literal(static_cast<long long>(i + 1)));
    g.insert(iri(u), value, rdf::lang_literal(utt.phrase, ctx.lang_tag));
    if (utt.translation) {
      const std::string& lang = utt.translation->lang.empty() ? ctx.metalanguage : utt.translation->lang;
      g.insert(iri(u), iri(vocab::ligt("translation")), rdf::lang_literal(utt.translation->text, lang));
    }

    for (std::size_t j = 0; j < utt.words.size(); ++j) {
      const Word& word = utt.words[j];
      const std::string w = u + "-w-" + std::to_string(j + 1);
      g.insert(iri(u), iri(vocab::ligt("hasWords")), iri(w));
      g.insert(iri(w), type, iri(vocab::ligt("Word")));
      g.insert(iri(w), index, rdf::integer_literal(static_cast<long long>(j + 1)));
      g.insert(iri(w), value, rdf::lang_literal(word.surface, ctx.lang_tag));

      for (std::size_t k = 0; k < word.morphs.size(); ++k) {
        const Morph& morph = word.morphs[k];
        const std::string m = w + "-m-" + std::to_string(k + 1);
        g.insert(iri(w), iri(vocab::ligt("hasMorphs")), iri(m));
        g.insert(iri(m), type, iri(vocab::ligt("Morph")));
        g.insert(iri(m), index, rdf::integer_literal(static_cast<long long>(k + 1)));
        g.insert(iri(m), value, rdf::lang_literal(morph.form, ctx.lang_tag));
        g.insert(iri(m), iri(vocab::ligt("gloss")), rdf::literal(morph.gloss));
      }
    }
  }
  return g;
}

std::vector<LinkTarget> LinkSet::lookup(std::string_view headword, std::string_view pos) const {
  std::vector<LinkTarget> out;
  const std::string lemma = text::lower(headword);
  auto add = [&](const std::optional<std::string>& key_pos) {
    if (auto it = records.find({lemma, key_pos}); it != records.end()) {
      out.insert(out.end(), it->second.begin(), it->second.end());
    }
  };
  if (!pos.empty()) add(text::lower(pos));
  add(std::nullopt);
  return out;
}

LinkSet load_linkset(std::string_view csv) {
  LinkSet set;
  const auto rows = ingest::parse_csv(csv);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const ingest::CsvRow& row = rows[r];
    if (row.cells.size() == 1 && row.cells[0].empty()) continue;
    if (r == 0 && !row.cells.empty() && text::trim(row.cells[0]) == "lemma") continue;
    const std::string where = "row " + std::to_string(row.row);
    if (row.cells.size() != 3 && row.cells.size() != 4) {
      throw ParseError(ErrorCode::CsvShapeError, row.line, 1,
                       where + ": expected lemma,pos,target_iri[,source], found " +
                           std::to_string(row.cells.size()) + " columns");
    }
    const std::string lemma = text::lower(text::nfc(text::trim(row.cells[0])));
    if (lemma.empty()) throw ParseError(ErrorCode::CsvShapeError, row.line, 1, where + ": empty lemma");
    const std::string_view pos = text::trim(row.cells[1]);
    const std::string target(text::trim(row.cells[2]));
    if (!rdf::is_absolute_iri(target)) {
      throw ParseError(ErrorCode::InvalidIri, row.line, 1, where + ": '" + target + "' is not an absolute IRI");
    }
    std::optional<std::string> key_pos;
    if (!pos.empty()) key_pos = text::lower(pos);
    const std::string source = row.cells.size() == 4 ? std::string(text::trim(row.cells[3])) : std::string();
    set.records[{lemma, key_pos}].push_back({target, source});
  }
  return set;
}

Graph link_externals(const LexicalEntry& entry, const LinkSet& linkset, const MappingContext& ctx) {
  Graph g;
  const auto targets = linkset.lookup(entry.headword, entry.pos);
  if (targets.empty()) return g;
  const std::string e = entry_iri(ctx, entry.id);
  for (std::size_t k = 0; k < entry.senses.size(); ++k) {
    const std::string sk = e + "#sense-" + std::to_string(k + 1);
    for (const LinkTarget& t : targets) g.insert(iri(sk), iri(vocab::ontolex("reference")), iri(t.iri));
  }
  return g;
}

Graph lexicon_to_ontolex(std::span<const LexicalEntry> entries, const MappingContext& ctx, const LinkSet* linkset,
                         Warnings* warnings) {
  Graph g;
  for (const LexicalEntry& e : entries) {
    g.merge(entry_to_ontolex(e, ctx, warnings));
    if (linkset) g.merge(link_externals(e, *linkset, ctx));
  }
  return g;
}

Graph texts_to_ligt(std::span<const IGTDocument> docs, const MappingContext& ctx) {
  Graph g;
  for (const IGTDocument& d : docs) g.merge(igt_to_ligt(d, ctx));
  return g;
}

}  // namespace life::linked
