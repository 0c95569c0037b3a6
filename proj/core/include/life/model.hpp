#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Shared domain types. Everything here is a plain value type; identity is a
// random 128-bit hex id so data from different installations can be merged
// without collisions.
namespace life {

enum class Role { Owner, Editor, Viewer };

std::string_view to_string(Role role) noexcept;
std::optional<Role> parse_role(std::string_view s) noexcept;

struct Project {
  std::string id;
  std::string name;
  std::string slug;
  std::string language_name;
  std::string language_code;  // ISO 639-3
  std::vector<std::string> alphabet;
  std::vector<std::string> pos_inventory;
  std::map<std::string, Role> members;  // user id -> role
  std::string created_at;
  std::string rev;

  bool operator==(const Project&) const = default;
};

struct User {
  std::string id;
  std::string username;
  std::string password_hash;
  std::optional<std::string> email;

  bool operator==(const User&) const = default;
};

struct Example {
  std::string vernacular;
  std::string translation;

  bool operator==(const Example&) const = default;
};

struct Sense {
  int sense_no = 1;
  std::string gloss;
  std::optional<std::string> definition;
  std::optional<std::string> semantic_domain;
  std::vector<Example> examples;

  bool operator==(const Sense&) const = default;
};

// A field the importer did not recognise, kept verbatim and in order.
struct ExtraField {
  std::string marker;
  std::string value;

  bool operator==(const ExtraField&) const = default;
};

struct LexicalEntry {
  std::string id;
  std::string project_id;
  std::string headword;
  int homonym_no = 1;
  std::string pos;
  std::vector<Sense> senses;
  std::vector<std::string> variants;
  std::vector<std::string> media;
  std::vector<ExtraField> extras;
  std::string created_at;
  std::string modified_at;
  std::string rev;

  bool operator==(const LexicalEntry&) const = default;
};

enum class MediaKind { Audio, Video, Image };

std::string_view to_string(MediaKind kind) noexcept;
std::optional<MediaKind> parse_media_kind(std::string_view s) noexcept;
// "audio/ogg" -> Audio; nullopt for mime types outside the three families.
std::optional<MediaKind> media_kind_for_mime(std::string_view mime) noexcept;

struct MediaAsset {
  std::string id;
  std::string project_id;
  MediaKind kind = MediaKind::Audio;
  std::string mime;
  std::uint64_t byte_size = 0;
  std::string sha256;
  std::string filename;

  bool operator==(const MediaAsset&) const = default;
};

enum class MorphType { Prefix, Root, Suffix, Clitic };

std::string_view to_string(MorphType type) noexcept;
std::optional<MorphType> parse_morph_type(std::string_view s) noexcept;

struct Morph {
  std::string form;  // separator marks stripped; position lives in `type`
  std::string gloss;
  MorphType type = MorphType::Root;

  bool operator==(const Morph&) const = default;
};

struct Word {
  std::string surface;
  std::vector<Morph> morphs;
  std::optional<std::string> pos;

  bool operator==(const Word&) const = default;
};

struct Translation {
  std::string text;
  std::string lang;  // BCP-47

  bool operator==(const Translation&) const = default;
};

struct MediaRef {
  std::string asset_id;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;

  bool operator==(const MediaRef&) const = default;
};

struct Utterance {
  std::string id;
  std::string phrase;
  std::vector<Word> words;
  std::optional<Translation> translation;
  std::optional<MediaRef> media_ref;
  bool glossed = false;

  bool operator==(const Utterance&) const = default;
};

// A text: one or more utterances. A "paragraph" is stored the same way.
struct IGTDocument {
  std::string id;
  std::string project_id;
  std::string title;
  std::vector<Utterance> utterances;
  std::string rev;

  bool operator==(const IGTDocument&) const = default;
};

enum class Severity { Error, Warning };

struct ValidationIssue {
  Severity severity = Severity::Error;
  std::string path;
  std::string message;

  bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationIssue> issues;

  void error(std::string path, std::string message);
  void warning(std::string path, std::string message);
  std::size_t count(Severity severity) const noexcept;

  bool operator==(const ValidationReport&) const = default;
};

// Fresh random id: 32 lowercase hex chars.
std::string new_id();
bool is_valid_id(std::string_view id) noexcept;

// Current UTC time, RFC 3339 with second precision ("2024-05-01T10:00:00Z").
std::string now_rfc3339();

bool is_valid_slug(std::string_view slug) noexcept;
bool is_valid_username(std::string_view name) noexcept;
bool is_valid_language_code(std::string_view code) noexcept;

// Lowercases, collapses non-alphanumeric runs into "-", strips the ends.
// Throws Error(InvalidName) when nothing is left.
std::string slugify(std::string_view name);

ValidationReport validate_entry(const LexicalEntry& entry, const Project& project);
ValidationReport validate_utterance(const Utterance& utt);
ValidationReport validate_project(const Project& project);

}  // namespace life
