#include "life/rdf.hpp"

#include <sodium.h>

#include <algorithm>
#include <regex>

#include "life/text.hpp"
#include "sodium_init.hpp"

namespace life::rdf {

namespace {

constexpr std::string_view kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";
constexpr std::string_view kXsdString = "http://www.w3.org/2001/XMLSchema#string";

std::string digest(std::string_view bytes) {
  detail::ensure_sodium();
  unsigned char out[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(out, reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
  return text::to_hex(out, sizeof out);
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string literal_nt(const Literal& l) {
  std::string out = "\"" + escape_string(l.lexical) + "\"";
  if (!l.lang.empty()) {
    out += "@" + l.lang;
  } else if (!l.datatype.empty()) {
    out += "^^<" + l.datatype + ">";
  }
  return out;
}

// Spelling of a term with blank nodes rewritten through `label_of`.
template <typename F>
std::string spell(const Term& t, F&& label_of) {
  if (const auto* i = std::get_if<Iri>(&t)) return "<" + i->value + ">";
  if (const auto* b = std::get_if<BlankNode>(&t)) return "_:" + label_of(b->label);
  return literal_nt(std::get<Literal>(t));
}

const std::string* blank_label(const Term& t) {
  const auto* b = std::get_if<BlankNode>(&t);
  return b ? &b->label : nullptr;
}

}  // namespace

bool is_absolute_iri(std::string_view iri) noexcept {
  if (iri.empty()) return false;
  const auto colon = iri.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  const auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  if (!alpha(iri[0])) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    const char c = iri[i];
    if (!alpha(c) && !(c >= '0' && c <= '9') && c != '+' && c != '-' && c != '.') return false;
  }
  for (char c : iri) {
    const auto u = static_cast<unsigned char>(c);
    if (u <= 0x20) return false;
    switch (c) {
      case '<': case '>': case '"': case '{': case '}': case '|': case '^': case '`': case '\\':
        return false;
      default:
        break;
    }
  }
  return true;
}

Iri iri(std::string value) { return Iri{std::move(value)}; }
BlankNode blank(std::string label) { return BlankNode{std::move(label)}; }
Literal literal(std::string lexical) { return Literal{std::move(lexical), {}, {}}; }

Literal lang_literal(std::string lexical, std::string_view lang) {
  return Literal{std::move(lexical), ascii_lower(lang), {}};
}

Literal typed_literal(std::string lexical, std::string datatype) {
  // xsd:string is the implicit type of a plain literal.
  if (datatype == kXsdString) datatype.clear();
  return Literal{std::move(lexical), {}, std::move(datatype)};
}

Literal integer_literal(long long value) {
  return Literal{std::to_string(value), {}, std::string(kXsdInteger)};
}

bool Graph::insert(Term subject, Iri predicate, Term object) {
  if (std::holds_alternative<Literal>(subject)) return false;
  if (!is_absolute_iri(predicate.value)) return false;
  for (const Term* t : {&subject, &object}) {
    if (const auto* i = std::get_if<Iri>(t); i && !is_absolute_iri(i->value)) return false;
    if (const auto* b = std::get_if<BlankNode>(t); b && b->label.empty()) return false;
    if (const auto* l = std::get_if<Literal>(t)) {
      if (!l->lang.empty() && !l->datatype.empty()) return false;
      if (!l->datatype.empty() && !is_absolute_iri(l->datatype)) return false;
    }
  }
  return triples_.insert(Triple{std::move(subject), std::move(predicate), std::move(object)}).second;
}

void Graph::merge(const Graph& other) { triples_.insert(other.triples_.begin(), other.triples_.end()); }

std::vector<Triple> Graph::match(const Term* subject, const Iri* predicate, const Term* object) const {
  std::vector<Triple> out;
  for (const Triple& t : triples_) {
    if (subject && t.subject != *subject) continue;
    if (predicate && t.predicate != *predicate) continue;
    if (object && t.object != *object) continue;
    out.push_back(t);
  }
  return out;
}

std::string escape_string(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
          static constexpr char hex[] = "0123456789ABCDEF";
          out += "\\u00";
          out += hex[(static_cast<unsigned char>(c) >> 4) & 0xf];
          out += hex[static_cast<unsigned char>(c) & 0xf];
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string to_ntriples(const Term& term) {
  return spell(term, [](const std::string& l) { return l; });
}

std::map<std::string, std::string> canonical_blank_labels(const Graph& graph) {
  std::map<std::string, std::vector<const Triple*>> occurrences;
  for (const Triple& t : graph.triples()) {
    if (const auto* s = blank_label(t.subject)) occurrences[*s].push_back(&t);
    if (const auto* o = blank_label(t.object); o && (!blank_label(t.subject) || *o != *blank_label(t.subject))) {
      occurrences[*o].push_back(&t);
    }
  }
  if (occurrences.empty()) return {};

  // Colour refinement: a node's signature is the hash of its incident
  // triples, with neighbouring blank nodes spelled by their previous
  // signature. Stops once the partition no longer splits.
  std::map<std::string, std::string> sig;
  for (const auto& [label, _] : occurrences) sig[label] = "";
  std::size_t classes = 1;
  for (std::size_t round = 0; round <= occurrences.size(); ++round) {
    std::map<std::string, std::string> next;
    for (const auto& [label, triples] : occurrences) {
      std::vector<std::string> lines;
      lines.reserve(triples.size());
      for (const Triple* t : triples) {
        auto name = [&](const std::string& l) { return l == label ? std::string("@") : "~" + sig[l]; };
        lines.push_back(spell(t->subject, name) + " <" + t->predicate.value + "> " + spell(t->object, name));
      }
      std::sort(lines.begin(), lines.end());
      std::string joined;
      for (const auto& l : lines) joined += l + "\n";
      next[label] = digest(joined);
    }
    std::set<std::string> distinct;
    for (const auto& [_, s] : next) distinct.insert(s);
    sig = std::move(next);
    if (distinct.size() == classes && round > 0) break;
    classes = distinct.size();
  }

  // Pre-pass: sort triples spelled with signatures (ties broken by the
  // original label), then number blank nodes by first appearance.
  std::vector<std::pair<std::string, const Triple*>> prepass;
  for (const Triple& t : graph.triples()) {
    if (!blank_label(t.subject) && !blank_label(t.object)) continue;
    auto name = [&](const std::string& l) { return sig[l] + "." + l; };
    prepass.emplace_back(spell(t.subject, name) + " <" + t.predicate.value + "> " + spell(t.object, name), &t);
  }
  std::sort(prepass.begin(), prepass.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::map<std::string, std::string> result;
  auto visit = [&](const Term& t) {
    if (const auto* l = blank_label(t); l && !result.count(*l)) {
      result[*l] = "b" + std::to_string(result.size());
    }
  };
  for (const auto& [_, t] : prepass) {
    // Subject and object are visited in signature order so the numbering
    // never depends on original labels unless signatures tie.
    visit(t->subject);
    visit(t->object);
  }
  return result;
}

std::string serialize_ntriples(const Graph& graph) {
  const auto labels = canonical_blank_labels(graph);
  auto name = [&](const std::string& l) { return labels.at(l); };
  std::vector<std::string> lines;
  lines.reserve(graph.size());
  for (const Triple& t : graph.triples()) {
    lines.push_back(spell(t.subject, name) + " <" + t.predicate.value + "> " + spell(t.object, name) + " .\n");
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l;
  return out;
}

namespace {

class TurtleWriter {
 public:
  TurtleWriter(const Graph& graph, const std::vector<Prefix>& prefixes)
      : graph_(graph), prefixes_(prefixes), labels_(canonical_blank_labels(graph)) {}

  std::string write() {
    std::string out;
    const auto blank_name = [this](const std::string& l) { return labels_.at(l); };
    for (const Prefix& p : prefixes_) out += "@prefix " + p.name + ": <" + p.ns + "> .\n";

    struct Group {
      std::string subject;
      std::map<std::string, std::vector<std::string>> objects;  // keyed by predicate sort key
    };
    std::map<std::string, Group> subjects;  // keyed by N-Triples spelling
    for (const Triple& t : graph_.triples()) {
      const std::string key = spell(t.subject, blank_name);
      Group& g = subjects[key];
      if (g.subject.empty()) g.subject = term(t.subject);
      // rdf:type sorts first and is written "a".
      const bool is_type = t.predicate.value == kRdfType;
      const std::string pkey = is_type ? std::string(1, '\0') : t.predicate.value;
      g.objects[pkey].push_back(spell(t.object, blank_name) + '\x01' + term(t.object));
    }

    for (auto& [_, g] : subjects) {
      out += "\n" + g.subject;
      bool first_pred = true;
      for (auto& [pkey, objs] : g.objects) {
        std::sort(objs.begin(), objs.end());
        out += first_pred ? " " : " ;\n    ";
        first_pred = false;
        out += pkey[0] == '\0' ? std::string("a") : iri_term(pkey);
        bool first_obj = true;
        for (const std::string& o : objs) {
          out += first_obj ? " " : " , ";
          first_obj = false;
          out += o.substr(o.find('\x01') + 1);
        }
      }
      out += " .\n";
    }
    return out;
  }

 private:
  static constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

  static bool plain_local(std::string_view local) {
    static const std::regex safe("[A-Za-z0-9_][A-Za-z0-9_-]*");
    return !local.empty() && std::regex_match(local.begin(), local.end(), safe);
  }

  std::string iri_term(const std::string& value) const {
    const Prefix* best = nullptr;
    for (const Prefix& p : prefixes_) {
      if (value.size() > p.ns.size() && text::starts_with(value, p.ns) &&
          plain_local(std::string_view(value).substr(p.ns.size())) &&
          (!best || p.ns.size() > best->ns.size())) {
        best = &p;
      }
    }
    if (best) return best->name + ":" + value.substr(best->ns.size());
    return "<" + value + ">";
  }

  std::string term(const Term& t) const {
    if (const auto* i = std::get_if<Iri>(&t)) return iri_term(i->value);
    if (const auto* b = std::get_if<BlankNode>(&t)) return "_:" + labels_.at(b->label);
    const Literal& l = std::get<Literal>(t);
    std::string out = "\"" + escape_string(l.lexical) + "\"";
    if (!l.lang.empty()) {
      out += "@" + l.lang;
    } else if (!l.datatype.empty()) {
      out += "^^" + iri_term(l.datatype);
    }
    return out;
  }

  const Graph& graph_;
  const std::vector<Prefix>& prefixes_;
  std::map<std::string, std::string> labels_;
};

}  // namespace

std::string serialize_turtle(const Graph& graph, const std::vector<Prefix>& prefixes) {
  return TurtleWriter(graph, prefixes).write();
}

}  // namespace life::rdf
