#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "life/model.hpp"
#include "life/rdf.hpp"

// Lexicon to OntoLex-Lemon, IGT to Ligt, and offline external links.
namespace life::linked {

// Every class and property IRI the mappers emit.
namespace vocab {
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOntolex = "http://www.w3.org/ns/lemon/ontolex#";
inline constexpr std::string_view kLexinfo = "http://www.lexinfo.net/ontology/3.0/lexinfo#";
inline constexpr std::string_view kSkos = "http://www.w3.org/2004/02/skos/core#";
inline constexpr std::string_view kLigt = "http://purl.org/liodi/ligt/";
inline constexpr std::string_view kDct = "http://purl.org/dc/terms/";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
// Relative to the deployment base IRI.
inline constexpr std::string_view kLigtExtPath = "ns/ligt-ext#";

std::string rdf(std::string_view local);
std::string ontolex(std::string_view local);
std::string lexinfo(std::string_view local);
std::string skos(std::string_view local);
std::string ligt(std::string_view local);
std::string xsd(std::string_view local);
}  // namespace vocab

// POS labels (lowercase) to lexinfo IRIs.
std::map<std::string, std::string> default_pos_map();

struct MappingContext {
  std::string base_iri;  // absolute, ends with "/"
  std::string project_slug;
  std::string lang_tag;
  std::string metalanguage = "en";
  std::map<std::string, std::string> pos_map = default_pos_map();

  std::string ligt_ext(std::string_view local) const;
};

// Throws Error(InvalidIri) when base_iri is not absolute or lacks the
// trailing slash.
MappingContext make_context(const Project& project, std::string base_iri);

std::vector<rdf::Prefix> prefix_table(const MappingContext& ctx);

std::string entry_iri(const MappingContext& ctx, std::string_view entry_id);
std::string document_iri(const MappingContext& ctx, std::string_view doc_id);

// Mapping problems that do not stop the export, e.g. an unmapped POS.
using Warnings = std::vector<std::string>;

rdf::Graph entry_to_ontolex(const LexicalEntry& entry, const MappingContext& ctx, Warnings* warnings = nullptr);
rdf::Graph igt_to_ligt(const IGTDocument& doc, const MappingContext& ctx);

struct LinkTarget {
  std::string iri;
  std::string source;
  bool operator==(const LinkTarget&) const = default;
};

// Keys are (lowercased lemma, lowercased pos); an absent pos matches any.
struct LinkSet {
  std::map<std::pair<std::string, std::optional<std::string>>, std::vector<LinkTarget>> records;

  std::vector<LinkTarget> lookup(std::string_view headword, std::string_view pos) const;
};

// CSV with header lemma,pos,target_iri[,source]. Throws ParseError with
// CsvShapeError or InvalidIri naming the row.
LinkSet load_linkset(std::string_view csv);

rdf::Graph link_externals(const LexicalEntry& entry, const LinkSet& linkset, const MappingContext& ctx);

// Whole-lexicon export: every entry plus its external links.
rdf::Graph lexicon_to_ontolex(std::span<const LexicalEntry> entries, const MappingContext& ctx,
                              const LinkSet* linkset = nullptr, Warnings* warnings = nullptr);
rdf::Graph texts_to_ligt(std::span<const IGTDocument> docs, const MappingContext& ctx);

}  // namespace life::linked
