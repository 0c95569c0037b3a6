#include "rdf_reader.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace testsupport {

namespace {

const std::string kXsd = "http://www.w3.org/2001/XMLSchema#";
const std::string kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
 public:
  Parser(std::string_view text, bool ntriples) : s_(text), nt_(ntriples) {}

  RGraph run() {
    skip_ws();
    while (pos_ < s_.size()) {
      if (nt_) {
        ntriple_line();
      } else if (peek() == '@' || starts_keyword("PREFIX") || starts_keyword("BASE")) {
        directive();
      } else {
        triples();
        expect('.');
      }
      skip_ws();
    }
    return std::move(graph_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1 + static_cast<std::size_t>(std::count(s_.begin(), s_.begin() + static_cast<long>(pos_), '\n'));
    throw ReadError("line " + std::to_string(line) + ": " + msg);
  }

  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }

  bool starts_keyword(std::string_view kw) const {
    if (s_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(s_[pos_ + i])) != kw[i]) return false;
    }
    return true;
  }

  void skip_ws() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  // N-Triples allows only spaces and tabs inside a statement.
  void skip_inline_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void ntriple_line() {
    RTerm s = nt_subject();
    skip_inline_ws();
    if (peek() != '<') fail("predicate must be an IRI");
    RTerm p{RTerm::Iri, iriref(), {}, {}};
    skip_inline_ws();
    RTerm o = nt_object();
    skip_inline_ws();
    if (peek() != '.') fail("expected '.'");
    ++pos_;
    skip_inline_ws();
    if (peek() == '#') {
      while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
    }
    if (pos_ < s_.size()) {
      if (peek() == '\r') ++pos_;
      if (peek() != '\n') fail("one triple per line");
      ++pos_;
    }
    graph_.insert({s, p, o});
  }

  RTerm nt_subject() {
    if (peek() == '<') return {RTerm::Iri, iriref(), {}, {}};
    if (peek() == '_') return {RTerm::Blank, blank_label(), {}, {}};
    fail("bad subject");
  }

  RTerm nt_object() {
    if (peek() == '"') return literal();
    return nt_subject();
  }

  void directive() {
    bool sparql = peek() != '@';
    if (!sparql) ++pos_;
    if (starts_keyword("PREFIX")) {
      pos_ += 6;
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < s_.size() && s_[pos_] != ':') ++pos_;
      if (pos_ >= s_.size()) fail("bad prefix");
      std::string name(s_.substr(start, pos_ - start));
      ++pos_;
      skip_ws();
      prefixes_[name] = iriref();
    } else if (starts_keyword("BASE")) {
      pos_ += 4;
      skip_ws();
      base_ = iriref();
    } else {
      fail("unknown directive");
    }
    if (!sparql) expect('.');
  }

  void triples() {
    skip_ws();
    RTerm subject;
    if (peek() == '[') {
      subject = blank_property_list();
      skip_ws();
      if (peek() == '.') return;
    } else {
      subject = term(false);
    }
    predicate_object_list(subject);
  }

  void predicate_object_list(const RTerm& subject) {
    for (;;) {
      skip_ws();
      RTerm pred;
      if (peek() == 'a' && (peek(1) == ' ' || peek(1) == '\t' || peek(1) == '\n' || peek(1) == '<' ||
                            peek(1) == '"' || peek(1) == '_' || peek(1) == '[')) {
        ++pos_;
        pred = {RTerm::Iri, kRdfType, {}, {}};
      } else {
        pred = term(false);
        if (pred.kind != RTerm::Iri) fail("predicate must be an IRI");
      }
      for (;;) {
        skip_ws();
        RTerm obj = peek() == '[' ? blank_property_list() : term(true);
        graph_.insert({subject, pred, obj});
        skip_ws();
        if (peek() != ',') break;
        ++pos_;
      }
      skip_ws();
      if (peek() != ';') return;
      while (peek() == ';') {
        ++pos_;
        skip_ws();
      }
      if (peek() == '.' || peek() == ']') return;
    }
  }

  RTerm blank_property_list() {
    expect('[');
    RTerm node{RTerm::Blank, "anon" + std::to_string(++anon_), {}, {}};
    skip_ws();
    if (peek() != ']') predicate_object_list(node);
    expect(']');
    return node;
  }

  RTerm term(bool allow_literal) {
    skip_ws();
    const char c = peek();
    if (c == '<') return {RTerm::Iri, resolve(iriref()), {}, {}};
    if (c == '_' && peek(1) == ':') return {RTerm::Blank, blank_label(), {}, {}};
    if (c == '"' || c == '\'') {
      if (!allow_literal) fail("literal not allowed here");
      return literal();
    }
    if (allow_literal && (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+')) return number();
    if (allow_literal && (starts_word("true") || starts_word("false"))) {
      const bool t = starts_word("true");
      pos_ += t ? 4 : 5;
      return {RTerm::Literal, t ? "true" : "false", {}, kXsd + "boolean"};
    }
    return {RTerm::Iri, prefixed_name(), {}, {}};
  }

  bool starts_word(std::string_view w) const {
    if (s_.substr(pos_, w.size()) != w) return false;
    const char after = peek(w.size());
    return !(std::isalnum(static_cast<unsigned char>(after)) || after == ':' || after == '_' || after == '-');
  }

  std::string resolve(const std::string& iri) const {
    if (base_.empty() || iri.find(':') != std::string::npos) return iri;
    return base_ + iri;
  }

  std::string iriref() {
    if (peek() != '<') fail("expected IRI");
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '>') {
      const char c = s_[pos_];
      if (c == ' ' || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' || c == '`' ||
          static_cast<unsigned char>(c) <= 0x20) {
        fail("illegal character in IRI");
      }
      if (c == '\\') {
        out += unicode_escape();
        continue;
      }
      out += c;
      ++pos_;
    }
    if (pos_ >= s_.size()) fail("unterminated IRI");
    ++pos_;
    return out;
  }

  std::string unicode_escape() {
    // at '\'
    const char k = peek(1);
    const std::size_t n = k == 'u' ? 4 : k == 'U' ? 8 : 0;
    if (!n) fail("bad escape");
    if (pos_ + 2 + n > s_.size()) fail("short escape");
    const std::string hex(s_.substr(pos_ + 2, n));
    pos_ += 2 + n;
    std::string out;
    append_utf8(out, std::stoul(hex, nullptr, 16));
    return out;
  }

  std::string blank_label() {
    pos_ += 2;  // "_:"
    const std::size_t start = pos_;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
          (c == '.' && pos_ + 1 < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])))) {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) fail("empty blank node label");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string prefixed_name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ':' && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (peek() != ':') fail("expected prefixed name");
    const std::string prefix(s_.substr(start, pos_ - start));
    ++pos_;
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail("undeclared prefix '" + prefix + "'");
    std::string local;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '\\' && pos_ + 1 < s_.size()) {
        local += s_[pos_ + 1];
        pos_ += 2;
      } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' ||
                 static_cast<unsigned char>(c) >= 0x80 ||
                 (c == '.' && pos_ + 1 < s_.size() &&
                  (std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '_'))) {
        local += c;
        ++pos_;
      } else {
        break;
      }
    }
    return it->second + local;
  }

  RTerm number() {
    const std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') ++pos_;
    bool dot = false;
    while (std::isdigit(static_cast<unsigned char>(peek())) ||
           (peek() == '.' && !dot && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      dot = dot || peek() == '.';
      ++pos_;
    }
    if (pos_ == start) fail("bad number");
    return {RTerm::Literal, std::string(s_.substr(start, pos_ - start)), {}, kXsd + (dot ? "decimal" : "integer")};
  }

  RTerm literal() {
    const char q = peek();
    const bool long_form = !nt_ && peek(1) == q && peek(2) == q;
    pos_ += long_form ? 3 : 1;
    std::string lex;
    for (;;) {
      if (pos_ >= s_.size()) fail("unterminated string");
      const char c = s_[pos_];
      if (long_form) {
        if (c == q && peek(1) == q && peek(2) == q) {
          pos_ += 3;
          break;
        }
      } else if (c == q) {
        ++pos_;
        break;
      } else if (c == '\n' || c == '\r') {
        fail("newline in string");
      }
      if (c == '\\') {
        const char e = peek(1);
        switch (e) {
          case 't': lex += '\t'; break;
          case 'b': lex += '\b'; break;
          case 'n': lex += '\n'; break;
          case 'r': lex += '\r'; break;
          case 'f': lex += '\f'; break;
          case '"': lex += '"'; break;
          case '\'': lex += '\''; break;
          case '\\': lex += '\\'; break;
          case 'u':
          case 'U': lex += unicode_escape(); continue;
          default: fail("bad string escape");
        }
        pos_ += 2;
        continue;
      }
      lex += c;
      ++pos_;
    }
    RTerm t{RTerm::Literal, lex, {}, {}};
    if (peek() == '@') {
      ++pos_;
      const std::size_t start = pos_;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-') ++pos_;
      if (pos_ == start) fail("empty language tag");
      t.lang = std::string(s_.substr(start, pos_ - start));
      std::transform(t.lang.begin(), t.lang.end(), t.lang.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    } else if (peek() == '^' && peek(1) == '^') {
      pos_ += 2;
      if (peek() == '<') {
        t.datatype = resolve(iriref());
      } else if (nt_) {
        fail("datatype must be an IRI");
      } else {
        t.datatype = prefixed_name();
      }
      if (t.datatype == kXsd + "string") t.datatype.clear();
    }
    return t;
  }

  std::string_view s_;
  bool nt_;
  std::size_t pos_ = 0;
  std::map<std::string, std::string> prefixes_;
  std::string base_;
  int anon_ = 0;
  RGraph graph_;
};

struct Matcher {
  const std::vector<RTriple>& a;
  const RGraph& b;
  std::vector<std::string> blanks_a;
  std::vector<std::string> candidates;  // blank labels of b
  std::map<std::string, std::string> map;
  std::set<std::string> used;

  RTerm apply(const RTerm& t) const {
    if (t.kind != RTerm::Blank) return t;
    auto it = map.find(t.value);
    RTerm out = t;
    out.value = it == map.end() ? "" : it->second;
    return out;
  }

  // Every triple of `a` whose blanks are all mapped must exist in `b`.
  bool consistent() const {
    for (const RTriple& t : a) {
      if ((t.s.kind == RTerm::Blank && !map.count(t.s.value)) || (t.o.kind == RTerm::Blank && !map.count(t.o.value))) {
        continue;
      }
      if (!b.count({apply(t.s), t.p, apply(t.o)})) return false;
    }
    return true;
  }

  bool search(std::size_t i) {
    if (i == blanks_a.size()) return true;
    for (const std::string& c : candidates) {
      if (used.count(c)) continue;
      map[blanks_a[i]] = c;
      used.insert(c);
      if (consistent() && search(i + 1)) return true;
      used.erase(c);
      map.erase(blanks_a[i]);
    }
    return false;
  }
};

std::set<std::string> blank_labels(const RGraph& g) {
  std::set<std::string> out;
  for (const RTriple& t : g) {
    if (t.s.kind == RTerm::Blank) out.insert(t.s.value);
    if (t.o.kind == RTerm::Blank) out.insert(t.o.value);
  }
  return out;
}

std::string show(const RTerm& t) {
  switch (t.kind) {
    case RTerm::Iri: return "<" + t.value + ">";
    case RTerm::Blank: return "_:" + t.value;
    case RTerm::Literal:
      return "\"" + t.value + "\"" + (t.lang.empty() ? "" : "@" + t.lang) +
             (t.datatype.empty() ? "" : "^^<" + t.datatype + ">");
  }
  return {};
}

}  // namespace

RGraph read_ntriples(std::string_view text) { return Parser(text, true).run(); }
RGraph read_turtle(std::string_view text) { return Parser(text, false).run(); }

RGraph from_library(const life::rdf::Graph& g) {
  auto conv = [](const life::rdf::Term& t) {
    if (auto* i = std::get_if<life::rdf::Iri>(&t)) return RTerm{RTerm::Iri, i->value, {}, {}};
    if (auto* b = std::get_if<life::rdf::BlankNode>(&t)) return RTerm{RTerm::Blank, b->label, {}, {}};
    const auto& l = std::get<life::rdf::Literal>(t);
    RTerm out{RTerm::Literal, l.lexical, l.lang, l.datatype};
    std::transform(out.lang.begin(), out.lang.end(), out.lang.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (out.datatype == kXsd + "string") out.datatype.clear();
    return out;
  };
  RGraph out;
  for (const auto& t : g.triples()) out.insert({conv(t.subject), {RTerm::Iri, t.predicate.value, {}, {}}, conv(t.object)});
  return out;
}

bool isomorphic(const RGraph& a, const RGraph& b) {
  if (a.size() != b.size()) return false;
  const auto ba = blank_labels(a);
  const auto bb = blank_labels(b);
  if (ba.size() != bb.size()) return false;
  if (ba.empty()) return a == b;
  // Ground triples must match exactly before any bijection is tried.
  for (const RTriple& t : a) {
    if (t.s.kind != RTerm::Blank && t.o.kind != RTerm::Blank && !b.count(t)) return false;
  }
  std::vector<RTriple> ta(a.begin(), a.end());
  Matcher m{ta, b, {ba.begin(), ba.end()}, {bb.begin(), bb.end()}, {}, {}};
  return m.search(0);
}

std::string describe(const RGraph& g) {
  std::ostringstream out;
  for (const RTriple& t : g) out << show(t.s) << ' ' << show(t.p) << ' ' << show(t.o) << " .\n";
  return out.str();
}

}  // namespace testsupport
