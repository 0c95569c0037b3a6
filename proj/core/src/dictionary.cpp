#include "life/dictionary.hpp"

#include <algorithm>
#include <map>

#include "life/text.hpp"

namespace life::dict {

namespace {

using codec::Json;

std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

// Plain text unless it contains AsciiDoc markup characters, in which case it
// goes through an inline passthrough.
std::string adoc_text(std::string_view s) {
  std::string flat;
  for (char c : s) flat += (c == '\n' || c == '\r') ? ' ' : c;
  if (flat.find_first_of("*_`#^~+[]{}\\<>'|") == std::string::npos) return flat;
  std::string out = "pass:c[";
  for (char c : flat) {
    if (c == ']') out += '\\';
    out += c;
  }
  out += ']';
  return out;
}

std::string letter_anchor(const std::string& letter) {
  if (letter == "#") return "letter-other";
  std::string id = "letter-";
  for (char c : letter) id += text::is_space(c) ? '_' : c;
  return id;
}

constexpr const char* kStyle =
    "body{font-family:serif;max-width:48em;margin:auto;padding:1em}"
    ".letters a{margin-right:.5em}"
    ".entry{margin:.4em 0}"
    ".headword{font-weight:bold}"
    ".pos{font-style:italic}"
    ".sense{margin-left:1em}"
    ".example{font-style:italic}"
    ".finderlist dt{font-weight:bold}";

}  // namespace

std::string superscript(int n) {
  static const char* digits[] = {"⁰", "¹", "²", "³", "⁴",
                                 "⁵", "⁶", "⁷", "⁸", "⁹"};
  std::string out;
  for (char c : std::to_string(n)) out += c == '-' ? "⁻" : digits[c - '0'];
  return out;
}

std::string DictEntry::display() const { return show_homonym ? headword + superscript(homonym_no) : headword; }

DictionaryDocument compile_dictionary(std::span<const LexicalEntry> entries, const Project& project) {
  DictionaryDocument doc;
  doc.title = project.name;
  doc.language_name = project.language_name;
  doc.language_code = project.language_code;
  if (entries.empty()) return doc;

  const Collator collator(project.alphabet);
  struct Keyed {
    CollationKey key;
    const LexicalEntry* entry;
  };
  std::vector<Keyed> sorted;
  sorted.reserve(entries.size());
  std::map<std::string, int> headword_count;
  for (const LexicalEntry& e : entries) {
    sorted.push_back({collator.key(e.headword), &e});
    ++headword_count[e.headword];
  }
  std::sort(sorted.begin(), sorted.end(), [](const Keyed& a, const Keyed& b) {
    if (auto c = a.key <=> b.key; c != 0) return c < 0;
    if (a.entry->homonym_no != b.entry->homonym_no) return a.entry->homonym_no < b.entry->homonym_no;
    return a.entry->id < b.entry->id;
  });

  std::map<std::string, std::vector<HeadwordRef>> reversal;
  std::int64_t current_rank = -1;
  for (const Keyed& k : sorted) {
    const LexicalEntry& e = *k.entry;
    const std::int64_t alphabet_size = static_cast<std::int64_t>(collator.size());
    const std::int64_t first = k.key.ranks.empty() ? alphabet_size : k.key.ranks.front();
    // Every headword outside the alphabet shares the "#" section.
    const std::int64_t rank = std::min(first, alphabet_size);
    if (doc.sections.empty() || rank != current_rank) {
      doc.sections.push_back({collator.initial(e.headword), {}});
      current_rank = rank;
    }

    DictEntry de;
    de.id = e.id;
    de.headword = e.headword;
    de.homonym_no = e.homonym_no;
    de.show_homonym = headword_count[e.headword] > 1;
    de.pos = e.pos;
    de.variants = e.variants;
    for (std::size_t i = 0; i < e.senses.size(); ++i) {
      const Sense& s = e.senses[i];
      de.senses.push_back({static_cast<int>(i) + 1, s.gloss, s.definition, s.semantic_domain, s.examples});
      const std::string gloss(text::trim(s.gloss));
      if (gloss.empty()) continue;
      auto& refs = reversal[gloss];
      if (refs.empty() || refs.back().entry_id != e.id) refs.push_back({e.id, de.display()});
    }
    doc.sections.back().entries.push_back(std::move(de));
  }
  // std::map orders UTF-8 byte-wise, which is code point order.
  for (auto& [gloss, refs] : reversal) doc.reversal.push_back({gloss, std::move(refs)});
  return doc;
}

std::string render_html(const DictionaryDocument& doc) {
  std::string out;
  out += "<!DOCTYPE html>\n<html lang=\"" + html_escape(doc.language_code) + "\">\n<head>\n";
  out += "<meta charset=\"utf-8\">\n<title>" + html_escape(doc.title) + "</title>\n";
  out += "<style>" + std::string(kStyle) + "</style>\n</head>\n<body>\n";
  out += "<h1>" + html_escape(doc.title) + "</h1>\n";

  out += "<nav class=\"letters\">";
  for (const Section& s : doc.sections) {
    out += "<a href=\"#" + html_escape(letter_anchor(s.letter)) + "\">" + html_escape(s.letter) + "</a>";
  }
  if (!doc.reversal.empty()) out += "<a href=\"#finderlist\">Finderlist</a>";
  out += "</nav>\n";

  for (const Section& s : doc.sections) {
    out += "<section class=\"letter\" id=\"" + html_escape(letter_anchor(s.letter)) + "\">\n";
    out += "<h2>" + html_escape(s.letter) + "</h2>\n";
    for (const DictEntry& e : s.entries) {
      out += "<div class=\"entry\" id=\"" + html_escape(e.id) + "\">";
      out += "<span class=\"headword\">" + html_escape(e.headword);
      if (e.show_homonym) out += "<sup>" + std::to_string(e.homonym_no) + "</sup>";
      out += "</span>";
      if (!e.pos.empty()) out += " <span class=\"pos\">" + html_escape(e.pos) + "</span>";
      if (!e.variants.empty()) {
        out += " <span class=\"variants\">(";
        for (std::size_t i = 0; i < e.variants.size(); ++i) {
          if (i) out += ", ";
          out += html_escape(e.variants[i]);
        }
        out += ")</span>";
      }
      out += "\n<ol class=\"senses\">";
      for (const DictSense& sense : e.senses) {
        out += "<li class=\"sense\">";
        if (!sense.gloss.empty()) out += "<span class=\"gloss\">" + html_escape(sense.gloss) + "</span>";
        if (sense.definition) out += " <span class=\"definition\">" + html_escape(*sense.definition) + "</span>";
        if (sense.semantic_domain) {
          out += " <span class=\"domain\">[" + html_escape(*sense.semantic_domain) + "]</span>";
        }
        for (const Example& ex : sense.examples) {
          out += " <span class=\"example\">" + html_escape(ex.vernacular) + "</span>";
          if (!ex.translation.empty()) {
            out += " <span class=\"translation\">" + html_escape(ex.translation) + "</span>";
          }
        }
        out += "</li>";
      }
      out += "</ol></div>\n";
    }
    out += "</section>\n";
  }

  if (!doc.reversal.empty()) {
    out += "<section class=\"finderlist\" id=\"finderlist\">\n<h2>Finderlist</h2>\n<dl>\n";
    for (const ReversalItem& r : doc.reversal) {
      out += "<dt>" + html_escape(r.gloss) + "</dt><dd>";
      for (std::size_t i = 0; i < r.refs.size(); ++i) {
        if (i) out += ", ";
        out += "<a href=\"#" + html_escape(r.refs[i].entry_id) + "\">" + html_escape(r.refs[i].display) + "</a>";
      }
      out += "</dd>\n";
    }
    out += "</dl>\n</section>\n";
  }
  out += "</body>\n</html>\n";
  return out;
}

std::string render_print(const DictionaryDocument& doc) {
  std::string out = "= " + adoc_text(doc.title.empty() ? "Dictionary" : doc.title) + "\n";
  out += ":doctype: book\n";
  if (!doc.language_code.empty()) out += ":lang: " + doc.language_code + "\n";

  for (const Section& s : doc.sections) {
    out += "\n<<<\n\n== " + adoc_text(s.letter) + "\n";
    for (const DictEntry& e : s.entries) {
      out += "\n[[" + e.id + "]]*" + adoc_text(e.display()) + "*";
      if (!e.pos.empty()) out += " _" + adoc_text(e.pos) + "_";
      if (!e.variants.empty()) {
        out += " (";
        for (std::size_t i = 0; i < e.variants.size(); ++i) {
          if (i) out += ", ";
          out += adoc_text(e.variants[i]);
        }
        out += ")";
      }
      for (const DictSense& sense : e.senses) {
        if (e.senses.size() > 1) out += " *" + std::to_string(sense.number) + ".*";
        if (!sense.gloss.empty()) out += " " + adoc_text(sense.gloss);
        if (sense.definition) out += "; " + adoc_text(*sense.definition);
        if (sense.semantic_domain) out += " [" + adoc_text(*sense.semantic_domain) + "]";
        for (const Example& ex : sense.examples) {
          out += " _" + adoc_text(ex.vernacular) + "_";
          if (!ex.translation.empty()) out += " " + adoc_text(ex.translation);
        }
        out += ".";
      }
      out += "\n";
    }
  }

  if (!doc.reversal.empty()) {
    out += "\n<<<\n\n== Finderlist\n\n";
    for (const ReversalItem& r : doc.reversal) {
      out += adoc_text(r.gloss) + ":: ";
      for (std::size_t i = 0; i < r.refs.size(); ++i) {
        if (i) out += ", ";
        out += "<<" + r.refs[i].entry_id + "," + adoc_text(r.refs[i].display) + ">>";
      }
      out += "\n";
    }
  }
  return out;
}

Json to_json(const DictionaryDocument& doc) {
  Json sections = Json::array();
  for (const Section& s : doc.sections) {
    Json entries = Json::array();
    for (const DictEntry& e : s.entries) {
      Json senses = Json::array();
      for (const DictSense& sense : e.senses) {
        Json js{{"number", sense.number}, {"gloss", sense.gloss}};
        if (sense.definition) js["definition"] = *sense.definition;
        if (sense.semantic_domain) js["semantic_domain"] = *sense.semantic_domain;
        Json examples = Json::array();
        for (const Example& ex : sense.examples) {
          examples.push_back({{"vernacular", ex.vernacular}, {"translation", ex.translation}});
        }
        js["examples"] = examples;
        senses.push_back(js);
      }
      entries.push_back({{"id", e.id},
                         {"headword", e.headword},
                         {"display", e.display()},
                         {"homonym_no", e.homonym_no},
                         {"pos", e.pos},
                         {"variants", e.variants},
                         {"senses", senses}});
    }
    sections.push_back({{"letter", s.letter}, {"entries", entries}});
  }
  Json reversal = Json::array();
  for (const ReversalItem& r : doc.reversal) {
    Json refs = Json::array();
    for (const HeadwordRef& ref : r.refs) refs.push_back({{"entry_id", ref.entry_id}, {"display", ref.display}});
    reversal.push_back({{"gloss", r.gloss}, {"refs", refs}});
  }
  return {{"title", doc.title},
          {"language_name", doc.language_name},
          {"language_code", doc.language_code},
          {"sections", sections},
          {"reversal", reversal}};
}

}  // namespace life::dict
