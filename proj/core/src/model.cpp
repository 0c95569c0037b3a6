#include "life/model.hpp"

#include <sodium.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <ctime>
#include <mutex>
#include <stdexcept>

#include "life/error.hpp"
#include "life/text.hpp"
#include "sodium_init.hpp"

namespace life {

namespace detail {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  });
}

}  // namespace detail

namespace {

bool is_ascii_alnum(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool has_space(std::string_view s) noexcept {
  return std::any_of(s.begin(), s.end(), text::is_space);
}

std::string at(std::string_view base, std::size_t i) {
  return std::string(base) + "/" + std::to_string(i);
}

}  // namespace

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::Owner: return "owner";
    case Role::Editor: return "editor";
    case Role::Viewer: return "viewer";
  }
  return "viewer";
}

std::optional<Role> parse_role(std::string_view s) noexcept {
  if (s == "owner") return Role::Owner;
  if (s == "editor") return Role::Editor;
  if (s == "viewer") return Role::Viewer;
  return std::nullopt;
}

std::string_view to_string(MediaKind kind) noexcept {
  switch (kind) {
    case MediaKind::Audio: return "audio";
    case MediaKind::Video: return "video";
    case MediaKind::Image: return "image";
  }
  return "audio";
}

std::optional<MediaKind> parse_media_kind(std::string_view s) noexcept {
  if (s == "audio") return MediaKind::Audio;
  if (s == "video") return MediaKind::Video;
  if (s == "image") return MediaKind::Image;
  return std::nullopt;
}

std::optional<MediaKind> media_kind_for_mime(std::string_view mime) noexcept {
  const auto slash = mime.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  return parse_media_kind(mime.substr(0, slash));
}

std::string_view to_string(MorphType type) noexcept {
  switch (type) {
    case MorphType::Prefix: return "prefix";
    case MorphType::Root: return "root";
    case MorphType::Suffix: return "suffix";
    case MorphType::Clitic: return "clitic";
  }
  return "root";
}

std::optional<MorphType> parse_morph_type(std::string_view s) noexcept {
  if (s == "prefix") return MorphType::Prefix;
  if (s == "root") return MorphType::Root;
  if (s == "suffix") return MorphType::Suffix;
  if (s == "clitic") return MorphType::Clitic;
  return std::nullopt;
}

void ValidationReport::error(std::string path, std::string message) {
  issues.push_back({Severity::Error, std::move(path), std::move(message)});
  ok = false;
}

void ValidationReport::warning(std::string path, std::string message) {
  issues.push_back({Severity::Warning, std::move(path), std::move(message)});
}

std::size_t ValidationReport::count(Severity severity) const noexcept {
  return static_cast<std::size_t>(std::count_if(
      issues.begin(), issues.end(),
      [severity](const ValidationIssue& i) { return i.severity == severity; }));
}

std::string new_id() {
  detail::ensure_sodium();
  std::array<unsigned char, 16> bytes{};
  randombytes_buf(bytes.data(), bytes.size());
  return text::to_hex(bytes.data(), bytes.size());
}

bool is_valid_id(std::string_view id) noexcept {
  return id.size() == 32 && std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

std::string now_rfc3339() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool is_valid_slug(std::string_view slug) noexcept {
  if (slug.empty()) return false;
  const auto ok_first = [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); };
  if (!ok_first(slug.front())) return false;
  return std::all_of(slug.begin(), slug.end(), [&](char c) { return ok_first(c) || c == '-'; });
}

bool is_valid_username(std::string_view name) noexcept {
  if (name.size() < 3 || name.size() > 32) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

bool is_valid_language_code(std::string_view code) noexcept {
  return code.size() == 3 &&
         std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

std::string slugify(std::string_view name) {
  std::string out;
  bool pending_dash = false;
  for (char c : name) {
    if (is_ascii_alnum(c)) {
      if (pending_dash && !out.empty()) out.push_back('-');
      pending_dash = false;
      out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    } else {
      pending_dash = true;
    }
  }
  if (out.empty()) {
    throw Error(ErrorCode::InvalidName, "name '" + std::string(name) + "' has no usable characters");
  }
  return out;
}

ValidationReport validate_entry(const LexicalEntry& entry, const Project& project) {
  ValidationReport report;
  if (!is_valid_id(entry.id)) report.error("id", "id must be 32 lowercase hex characters");
  if (!entry.project_id.empty() && !project.id.empty() && entry.project_id != project.id) {
    report.error("project_id", "entry belongs to a different project");
  }
  if (text::trim(entry.headword).empty()) report.error("headword", "headword is empty");
  if (entry.homonym_no < 1) report.error("homonym_no", "homonym number must be >= 1");

  if (entry.senses.empty()) {
    report.error("senses", "entry has no senses");
  }
  for (std::size_t i = 0; i < entry.senses.size(); ++i) {
    const Sense& s = entry.senses[i];
    const std::string path = at("senses", i);
    if (s.sense_no != static_cast<int>(i) + 1) {
      report.error(path + "/sense_no", "sense numbers must run 1..n without gaps");
    }
    if (s.gloss.empty() && s.definition.value_or("").empty()) {
      report.error(path, "sense needs a gloss or a definition");
    }
  }

  if (entry.pos.empty()) {
    report.warning("pos", "no part of speech");
  } else if (std::find(project.pos_inventory.begin(), project.pos_inventory.end(), entry.pos) ==
             project.pos_inventory.end()) {
    report.warning("pos", "part of speech '" + entry.pos + "' is not in the project inventory");
  }

  for (std::size_t i = 0; i < entry.media.size(); ++i) {
    if (!is_valid_id(entry.media[i])) report.error(at("media", i), "media reference is not an asset id");
  }
  for (std::size_t i = 0; i < entry.extras.size(); ++i) {
    if (entry.extras[i].marker.empty()) report.error(at("extras", i) + "/marker", "empty marker");
  }
  return report;
}

ValidationReport validate_utterance(const Utterance& utt) {
  ValidationReport report;
  if (!is_valid_id(utt.id)) report.error("id", "id must be 32 lowercase hex characters");
  if (text::trim(utt.phrase).empty()) report.error("phrase", "phrase is empty");

  std::string joined;
  for (std::size_t i = 0; i < utt.words.size(); ++i) {
    const Word& w = utt.words[i];
    const std::string wpath = at("words", i);
    if (w.surface.empty() || has_space(w.surface)) {
      report.error(wpath + "/surface", "word surface must be non-empty without whitespace");
    }
    if (!joined.empty()) joined.push_back(' ');
    joined += w.surface;

    if (utt.glossed && w.morphs.empty()) report.error(wpath + "/morphs", "glossed word has no morphs");
    for (std::size_t j = 0; j < w.morphs.size(); ++j) {
      const Morph& m = w.morphs[j];
      const std::string mpath = at(wpath + "/morphs", j);
      std::string_view stripped = m.form;
      while (!stripped.empty() && (stripped.front() == '-' || stripped.front() == '=')) stripped.remove_prefix(1);
      while (!stripped.empty() && (stripped.back() == '-' || stripped.back() == '=')) stripped.remove_suffix(1);
      if (stripped.empty()) {
        report.error(mpath + "/form", "morph form is empty");
      } else if (stripped.size() != m.form.size()) {
        report.error(mpath + "/form", "morph form carries separator marks");
      }
      if (has_space(m.form)) report.error(mpath + "/form", "morph form contains whitespace");
      if (utt.glossed && m.gloss.empty()) report.error(mpath + "/gloss", "glossed utterance has an empty gloss");
    }
  }
  if (joined != text::normalize_ws(utt.phrase)) {
    report.error("words", "word surfaces do not rejoin to the phrase");
  }

  if (utt.translation && utt.translation->lang.empty()) {
    report.error("translation/lang", "translation language tag is empty");
  }
  if (utt.media_ref) {
    const MediaRef& ref = *utt.media_ref;
    if (!is_valid_id(ref.asset_id)) report.error("media_ref/asset_id", "not an asset id");
    if (ref.start_ms < 0) report.error("media_ref/start_ms", "start must be >= 0");
    if (ref.end_ms <= ref.start_ms) report.error("media_ref/end_ms", "end must be after start");
  }
  return report;
}

ValidationReport validate_project(const Project& project) {
  ValidationReport report;
  if (text::trim(project.name).empty()) report.error("name", "project name is empty");
  if (!is_valid_slug(project.slug)) report.error("slug", "slug must match ^[a-z0-9][a-z0-9-]*$");
  if (!is_valid_language_code(project.language_code)) {
    report.error("language_code", "language code must be three lowercase letters");
  }
  for (std::size_t i = 0; i < project.alphabet.size(); ++i) {
    const std::string& unit = project.alphabet[i];
    if (unit.empty()) report.error(at("alphabet", i), "alphabet unit is empty");
    for (std::size_t k = 0; k < i; ++k) {
      if (project.alphabet[k] == unit) {
        report.error(at("alphabet", i), "alphabet unit '" + unit + "' repeats");
        break;
      }
    }
  }
  const bool has_owner = std::any_of(project.members.begin(), project.members.end(),
                                     [](const auto& m) { return m.second == Role::Owner; });
  if (!has_owner) report.error("members", "project needs at least one owner");
  return report;
}

}  // namespace life
