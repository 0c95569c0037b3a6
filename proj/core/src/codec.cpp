#include "life/codec.hpp"

#include "life/error.hpp"

namespace life::codec {

namespace {

// Field access on a JSON object with pointer-tracked errors.
class Reader {
 public:
  Reader(const Json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) throw SchemaError(ptr_.empty() ? "/" : ptr_, "expected an object");
  }

  std::string path(std::string_view key) const { return ptr_ + "/" + std::string(key); }

  const Json* find(std::string_view key) const {
    auto it = j_.find(std::string(key));
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const Json& require(std::string_view key) const {
    const Json* v = find(key);
    if (!v) throw SchemaError(path(key), "required field is missing");
    return *v;
  }

  std::string str(std::string_view key) const { return as_string(require(key), path(key)); }

  std::string str_or(std::string_view key, std::string fallback = {}) const {
    const Json* v = find(key);
    return v ? as_string(*v, path(key)) : fallback;
  }

  std::optional<std::string> opt_str(std::string_view key) const {
    const Json* v = find(key);
    if (!v) return std::nullopt;
    return as_string(*v, path(key));
  }

  std::int64_t integer_or(std::string_view key, std::int64_t fallback) const {
    const Json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw SchemaError(path(key), "expected an integer");
    return v->get<std::int64_t>();
  }

  bool boolean_or(std::string_view key, bool fallback) const {
    const Json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw SchemaError(path(key), "expected a boolean");
    return v->get<bool>();
  }

  const Json* array(std::string_view key, bool required) const {
    const Json* v = required ? &require(key) : find(key);
    if (v && !v->is_array()) throw SchemaError(path(key), "expected an array");
    return v;
  }

  std::vector<std::string> strings(std::string_view key) const {
    std::vector<std::string> out;
    if (const Json* arr = array(key, false)) {
      for (std::size_t i = 0; i < arr->size(); ++i) {
        out.push_back(as_string((*arr)[i], path(key) + "/" + std::to_string(i)));
      }
    }
    return out;
  }

  static std::string as_string(const Json& v, const std::string& where) {
    if (!v.is_string()) throw SchemaError(where, "expected a string");
    return v.get<std::string>();
  }

 private:
  const Json& j_;
  std::string ptr_;
};

template <typename T, typename F>
std::vector<T> each(const Reader& r, std::string_view key, bool required, F&& decode) {
  std::vector<T> out;
  if (const Json* arr = r.array(key, required)) {
    for (std::size_t i = 0; i < arr->size(); ++i) {
      out.push_back(decode((*arr)[i], r.path(key) + "/" + std::to_string(i)));
    }
  }
  return out;
}

Json strings_json(const std::vector<std::string>& v) {
  Json arr = Json::array();
  for (const auto& s : v) arr.push_back(s);
  return arr;
}

Sense sense_from_json(const Json& j, const std::string& ptr, int index) {
  Reader r(j, ptr);
  Sense s;
  s.sense_no = static_cast<int>(r.integer_or("sense_no", index + 1));
  s.gloss = r.str_or("gloss");
  s.definition = r.opt_str("definition");
  s.semantic_domain = r.opt_str("semantic_domain");
  s.examples = each<Example>(r, "examples", false, [](const Json& ej, const std::string& p) {
    Reader er(ej, p);
    return Example{er.str_or("vernacular"), er.str_or("translation")};
  });
  return s;
}

Morph morph_from_json(const Json& j, const std::string& ptr) {
  Reader r(j, ptr);
  Morph m;
  m.form = r.str("form");
  m.gloss = r.str_or("gloss");
  const std::string type = r.str_or("type", "root");
  auto parsed = parse_morph_type(type);
  if (!parsed) throw SchemaError(r.path("type"), "unknown morph type '" + type + "'");
  m.type = *parsed;
  return m;
}

Word word_from_json(const Json& j, const std::string& ptr) {
  Reader r(j, ptr);
  Word w;
  w.surface = r.str("surface");
  w.morphs = each<Morph>(r, "morphs", false, morph_from_json);
  w.pos = r.opt_str("pos");
  return w;
}

}  // namespace

std::string canonical(const Json& j) {
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

Json parse(std::string_view bytes) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
}

Json to_json(const Project& p) {
  Json members = Json::object();
  for (const auto& [user, role] : p.members) members[user] = std::string(to_string(role));
  return Json{{"id", p.id},
              {"name", p.name},
              {"slug", p.slug},
              {"language_name", p.language_name},
              {"language_code", p.language_code},
              {"alphabet", strings_json(p.alphabet)},
              {"pos_inventory", strings_json(p.pos_inventory)},
              {"members", members},
              {"created_at", p.created_at}};
}

Json to_json(const User& u) {
  Json j{{"id", u.id}, {"username", u.username}, {"password_hash", u.password_hash}};
  if (u.email) j["email"] = *u.email;
  return j;
}

Json to_json(const Sense& s) {
  Json examples = Json::array();
  for (const auto& ex : s.examples) {
    examples.push_back({{"vernacular", ex.vernacular}, {"translation", ex.translation}});
  }
  Json j{{"sense_no", s.sense_no}, {"gloss", s.gloss}, {"examples", examples}};
  if (s.definition) j["definition"] = *s.definition;
  if (s.semantic_domain) j["semantic_domain"] = *s.semantic_domain;
  return j;
}

Json to_json(const LexicalEntry& e) {
  Json senses = Json::array();
  for (const auto& s : e.senses) senses.push_back(to_json(s));
  Json extras = Json::array();
  for (const auto& x : e.extras) extras.push_back({{"marker", x.marker}, {"value", x.value}});
  return Json{{"id", e.id},
              {"project_id", e.project_id},
              {"headword", e.headword},
              {"homonym_no", e.homonym_no},
              {"pos", e.pos},
              {"senses", senses},
              {"variants", strings_json(e.variants)},
              {"media", strings_json(e.media)},
              {"extras", extras},
              {"created_at", e.created_at},
              {"modified_at", e.modified_at}};
}

Json to_json(const MediaAsset& a) {
  return Json{{"id", a.id},
              {"project_id", a.project_id},
              {"kind", std::string(to_string(a.kind))},
              {"mime", a.mime},
              {"byte_size", a.byte_size},
              {"sha256", a.sha256},
              {"filename", a.filename}};
}

Json to_json(const Morph& m) {
  return Json{{"form", m.form}, {"gloss", m.gloss}, {"type", std::string(to_string(m.type))}};
}

Json to_json(const Word& w) {
  Json morphs = Json::array();
  for (const auto& m : w.morphs) morphs.push_back(to_json(m));
  Json j{{"surface", w.surface}, {"morphs", morphs}};
  if (w.pos) j["pos"] = *w.pos;
  return j;
}

Json to_json(const Utterance& u) {
  Json words = Json::array();
  for (const auto& w : u.words) words.push_back(to_json(w));
  Json j{{"id", u.id}, {"phrase", u.phrase}, {"words", words}, {"glossed", u.glossed}};
  if (u.translation) j["translation"] = {{"text", u.translation->text}, {"lang", u.translation->lang}};
  if (u.media_ref) {
    j["media_ref"] = {{"asset_id", u.media_ref->asset_id},
                      {"start_ms", u.media_ref->start_ms},
                      {"end_ms", u.media_ref->end_ms}};
  }
  return j;
}

Json to_json(const IGTDocument& d) {
  Json utts = Json::array();
  for (const auto& u : d.utterances) utts.push_back(to_json(u));
  return Json{{"id", d.id}, {"project_id", d.project_id}, {"title", d.title}, {"utterances", utts}};
}

Json to_json(const ValidationReport& r) {
  Json issues = Json::array();
  for (const auto& i : r.issues) {
    issues.push_back({{"severity", i.severity == Severity::Error ? "error" : "warning"},
                      {"path", i.path},
                      {"message", i.message}});
  }
  return Json{{"ok", r.ok}, {"issues", issues}};
}

Project project_from_json(const Json& j, const std::string& ptr) {
  Reader r(j, ptr);
  Project p;
  p.id = r.str("id");
  p.name = r.str("name");
  p.slug = r.str_or("slug");
  p.language_name = r.str_or("language_name");
  p.language_code = r.str_or("language_code");
  p.alphabet = r.strings("alphabet");
  p.pos_inventory = r.strings("pos_inventory");
  if (const Json* members = r.find("members")) {
    if (!members->is_object()) throw SchemaError(r.path("members"), "expected an object");
    for (const auto& [user, role] : members->items()) {
      const std::string where = r.path("members") + "/" + user;
      auto parsed = parse_role(Reader::as_string(role, where));
      if (!parsed) throw SchemaError(where, "unknown role");
      p.members[user] = *parsed;
    }
  }
  p.created_at = r.str_or("created_at");
  p.rev = r.str_or("rev");
  return p;
}

User user_from_json(const Json& j, const std::string& ptr) {
  Reader r(j, ptr);
  User u;
  u.id = r.str("id");
  u.username = r.str("username");
  u.password_hash = r.str("password_hash");
  u.email = r.opt_str("email");
  return u;
}

LexicalEntry entry_from_json(const Json& j, const std::string& ptr) {
  Reader r(j, ptr);
  LexicalEntry e;
  e.id = r.str("id");
  e.project_id = r.str_or("project_id");
  e.headword = r.str("headword");
  e.homonym_no = static_cast<int>(r.integer_or("homonym_no", 1));
  e.pos = r.str_or("pos");
  int index = 0;
  e.senses = each<Sense>(r, "senses", true, [&index](const Json& sj, const std::string& p) {
    return sense_from_json(sj, p, index++);
  });
  e.variants = r.strings("variants");
  e.media = r.strings("media");
  e.extras = each<ExtraField>(r, "extras", false, [](const Json& xj, const std::string& p) {
    Reader xr(xj, p);
    return ExtraField{xr.str("marker"), xr.str_or("value")};
  });
  e.created_at = r.str_or("created_at");
  e.modified_at = r.str_or("modified_at");
  e.rev = r.str_or("rev");
  return e;
}

MediaAsset asset_from_json(const Json& j, const std::string& ptr) {
  Reader r(j, ptr);
  MediaAsset a;
  a.id = r.str("id");
  a.project_id = r.str_or("project_id");
  const std::string kind = r.str("kind");
  auto parsed = parse_media_kind(kind);
  if (!parsed) throw SchemaError(r.path("kind"), "unknown media kind '" + kind + "'");
  a.kind = *parsed;
  a.mime = r.str_or("mime");
  const std::int64_t size = r.integer_or("byte_size", 0);
  if (size < 0) throw SchemaError(r.path("byte_size"), "size must be >= 0");
  a.byte_size = static_cast<std::uint64_t>(size);
  a.sha256 = r.str("sha256");
  a.filename = r.str_or("filename");
  return a;
}

Utterance utterance_from_json(const Json& j, const std::string& ptr) {
  Reader r(j, ptr);
  Utterance u;
  u.id = r.str("id");
  u.phrase = r.str("phrase");
  u.words = each<Word>(r, "words", false, word_from_json);
  if (const Json* t = r.find("translation")) {
    Reader tr(*t, r.path("translation"));
    u.translation = Translation{tr.str("text"), tr.str_or("lang", "en")};
  }
  if (const Json* m = r.find("media_ref")) {
    Reader mr(*m, r.path("media_ref"));
    u.media_ref = MediaRef{mr.str("asset_id"), mr.integer_or("start_ms", 0), mr.integer_or("end_ms", 0)};
  }
  u.glossed = r.boolean_or("glossed", false);
  return u;
}

IGTDocument text_from_json(const Json& j, const std::string& ptr) {
  Reader r(j, ptr);
  IGTDocument d;
  d.id = r.str("id");
  d.project_id = r.str_or("project_id");
  d.title = r.str_or("title");
  d.utterances = each<Utterance>(r, "utterances", false, utterance_from_json);
  d.rev = r.str_or("rev");
  return d;
}

}  // namespace life::codec
