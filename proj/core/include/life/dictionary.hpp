#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "life/codec.hpp"
#include "life/collation.hpp"
#include "life/model.hpp"

namespace life::dict {

struct DictSense {
  int number = 1;
  std::string gloss;
  std::optional<std::string> definition;
  std::optional<std::string> semantic_domain;
  std::vector<Example> examples;
};

struct DictEntry {
  std::string id;
  std::string headword;
  int homonym_no = 1;
  bool show_homonym = false;  // more than one entry shares the headword
  std::string pos;
  std::vector<DictSense> senses;
  std::vector<std::string> variants;

  // Headword with a superscript homonym number when one is shown.
  std::string display() const;
};

struct Section {
  std::string letter;  // alphabet unit, or "#" for headwords outside the alphabet
  std::vector<DictEntry> entries;
};

struct HeadwordRef {
  std::string entry_id;
  std::string display;
};

struct ReversalItem {
  std::string gloss;
  std::vector<HeadwordRef> refs;
};

struct DictionaryDocument {
  std::string title;
  std::string language_name;
  std::string language_code;
  std::vector<Section> sections;
  std::vector<ReversalItem> reversal;
};

// Digits rendered with Unicode superscripts, e.g. 12 -> "¹²".
std::string superscript(int n);

DictionaryDocument compile_dictionary(std::span<const LexicalEntry> entries, const Project& project);

// Self-contained HTML page with anchors per entry id and per letter.
std::string render_html(const DictionaryDocument& doc);

// AsciiDoc for external typesetting: one page per letter.
std::string render_print(const DictionaryDocument& doc);

codec::Json to_json(const DictionaryDocument& doc);

}  // namespace life::dict
