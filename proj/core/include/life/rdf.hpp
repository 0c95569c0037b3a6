#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace life::rdf {

struct Iri {
  std::string value;
  auto operator<=>(const Iri&) const = default;
};

struct BlankNode {
  std::string label;
  auto operator<=>(const BlankNode&) const = default;
};

// Language tag and datatype are mutually exclusive; a literal with neither
// is an xsd:string.
struct Literal {
  std::string lexical;
  std::string lang;
  std::string datatype;
  auto operator<=>(const Literal&) const = default;
};

using Term = std::variant<Iri, BlankNode, Literal>;

struct Triple {
  Term subject;
  Iri predicate;
  Term object;
  auto operator<=>(const Triple&) const = default;
};

// "scheme:" prefix and no characters that cannot appear in an IRIREF.
bool is_absolute_iri(std::string_view iri) noexcept;

Iri iri(std::string value);
BlankNode blank(std::string label);
Literal literal(std::string lexical);
Literal lang_literal(std::string lexical, std::string_view lang);
Literal typed_literal(std::string lexical, std::string datatype);
Literal integer_literal(long long value);

// A set of triples. insert() rejects relative IRIs, literal subjects and
// literals carrying both a language tag and a datatype.
class Graph {
 public:
  bool insert(Term subject, Iri predicate, Term object);
  bool insert(const Triple& t) { return insert(t.subject, t.predicate, t.object); }
  void merge(const Graph& other);

  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }
  bool contains(const Triple& t) const { return triples_.count(t) > 0; }
  const std::set<Triple>& triples() const noexcept { return triples_; }

  std::vector<Triple> match(const Term* subject, const Iri* predicate, const Term* object) const;

  bool operator==(const Graph&) const = default;

 private:
  std::set<Triple> triples_;
};

struct Prefix {
  std::string name;
  std::string ns;
};

// One line per triple, lines sorted byte-wise, blank nodes canonically
// relabelled _:b0, _:b1, ...
std::string serialize_ntriples(const Graph& graph);

// Subjects sorted, predicates grouped with ";", objects with ",". Prefixes
// are emitted in the given order; IRIs are abbreviated only when the local
// part is a plain name.
std::string serialize_turtle(const Graph& graph, const std::vector<Prefix>& prefixes);

// N-Triples spelling of a single term.
std::string to_ntriples(const Term& term);

// Maps every blank label in the graph to its canonical "bN" label. Equal
// graphs always get the same mapping.
std::map<std::string, std::string> canonical_blank_labels(const Graph& graph);

// Turtle/N-Triples string escaping (without the surrounding quotes).
std::string escape_string(std::string_view s);

}  // namespace life::rdf
