#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "life/codec.hpp"
#include "life/dictionary.hpp"
#include "life/error.hpp"
#include "life/ingest.hpp"
#include "life/ontolex.hpp"
#include "life/service.hpp"
#include "life/text.hpp"

namespace life::service {

using codec::Json;
using auth::Action;

std::optional<std::string> Request::header(std::string_view name) const {
  auto it = headers.find(std::string(name));
  if (it == headers.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Request::param(std::string_view name) const {
  auto it = query.find(std::string(name));
  if (it == query.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::string>& export_formats() {
  static const std::vector<std::string> formats{"ontolex-ttl", "ligt-ttl", "nt", "json", "csv", "sfm"};
  return formats;
}

namespace {

constexpr std::string_view kApiPrefix = "/api/v1";

// Thrown for routing failures that have no library error code.
struct HttpError {
  int status;
  std::string code;
  std::string message;
};

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidCredentials:
    case ErrorCode::Unauthenticated: return 401;
    case ErrorCode::Forbidden: return 403;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::StaleRevision:
    case ErrorCode::Conflict: return 409;
    case ErrorCode::PayloadTooLarge: return 413;
    case ErrorCode::Io: return 500;
    default: return 400;
  }
}

Response json_response(int status, const Json& body) {
  Response r;
  r.status = status;
  r.body = codec::canonical(body);
  return r;
}

Response error_response(int status, std::string_view code, std::string_view message, Json extra = Json::object()) {
  Json err{{"code", code}, {"message", message}};
  for (auto& [k, v] : extra.items()) err[k] = v;
  return json_response(status, Json{{"error", err}});
}

Response validation_failed(const ValidationReport& report, const std::string& prefix = {}) {
  Json issues = Json::array();
  for (const ValidationIssue& i : report.issues) {
    if (i.severity != Severity::Error) continue;
    issues.push_back({{"path", prefix + i.path}, {"message", i.message}});
  }
  return error_response(422, to_string(ErrorCode::SchemaViolation), "validation failed", Json{{"issues", issues}});
}

struct ValidationFailed {
  Response response;
};

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < path.size()) {
    std::size_t end = path.find('/', pos);
    if (end == std::string_view::npos) end = path.size();
    if (end > pos) out.push_back(path.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

std::string bearer_token(const Request& req) {
  const auto h = req.header("authorization");
  if (!h) return {};
  constexpr std::string_view scheme = "Bearer ";
  if (h->size() <= scheme.size() || h->compare(0, scheme.size(), scheme) != 0) return {};
  return std::string(text::trim(std::string_view(*h).substr(scheme.size())));
}

Json body_object(const Request& req) {
  if (text::trim(req.body).empty()) return Json::object();
  Json j = codec::parse(req.body);
  if (!j.is_object()) throw SchemaError("/", "request body must be a JSON object");
  return j;
}

// If-Match header, then ?rev=, then a "rev" member of the JSON body.
std::optional<std::string> requested_rev(const Request& req, const Json* body = nullptr) {
  if (auto h = req.header("if-match")) {
    std::string v(text::trim(*h));
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    if (!v.empty()) return v;
  }
  if (auto q = req.param("rev"); q && !q->empty()) return q;
  if (body && body->is_object()) {
    if (auto it = body->find("rev"); it != body->end() && it->is_string()) return it->get<std::string>();
  }
  return std::nullopt;
}

std::size_t parse_size(const std::optional<std::string>& v, std::size_t fallback, const char* name) {
  if (!v || v->empty()) return fallback;
  std::size_t n = 0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), n);
  if (ec != std::errc{} || p != v->data() + v->size()) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be a non-negative integer");
  }
  return n;
}

Json with_rev(Json j, const std::string& rev) {
  j["rev"] = rev;
  return j;
}

Json public_user(const User& u) {
  Json j{{"id", u.id}, {"username", u.username}};
  if (u.email) j["email"] = *u.email;
  return j;
}

std::string mime_for_path(const std::filesystem::path& p) {
  static const std::map<std::string, std::string> types{
      {".html", "text/html; charset=utf-8"}, {".js", "text/javascript"},  {".mjs", "text/javascript"},
      {".css", "text/css"},                  {".json", "application/json"}, {".svg", "image/svg+xml"},
      {".png", "image/png"},                 {".ico", "image/x-icon"},     {".txt", "text/plain; charset=utf-8"},
      {".woff2", "font/woff2"},              {".map", "application/json"}};
  auto it = types.find(p.extension().string());
  return it == types.end() ? "application/octet-stream" : it->second;
}

std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<LexicalEntry> project_entries(const store::DocumentStore& store, const std::string& project_id) {
  store::QueryFilter f;
  f.project_id = project_id;
  std::vector<LexicalEntry> out;
  for (const auto& d : store.scan("entries", f)) {
    LexicalEntry e = codec::entry_from_json(d.json());
    e.rev = d.rev;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<IGTDocument> project_texts(const store::DocumentStore& store, const std::string& project_id) {
  store::QueryFilter f;
  f.project_id = project_id;
  std::vector<IGTDocument> out;
  for (const auto& d : store.scan("texts", f)) {
    IGTDocument t = codec::text_from_json(d.json());
    t.rev = d.rev;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Utterance> project_utterances(const store::DocumentStore& store, const std::string& project_id) {
  std::vector<Utterance> out;
  for (auto& t : project_texts(store, project_id)) {
    for (auto& u : t.utterances) out.push_back(std::move(u));
  }
  return out;
}

ValidationReport validate_text(const IGTDocument& t) {
  ValidationReport all;
  for (std::size_t i = 0; i < t.utterances.size(); ++i) {
    for (const ValidationIssue& issue : validate_utterance(t.utterances[i]).issues) {
      if (issue.severity == Severity::Error) {
        all.error("utterances/" + std::to_string(i) + "/" + issue.path, issue.message);
      }
    }
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < t.utterances.size(); ++i) {
    if (!ids.insert(t.utterances[i].id).second) {
      all.error("utterances/" + std::to_string(i) + "/id", "duplicate utterance id");
    }
  }
  return all;
}

namespace {

std::optional<linked::LinkSet> stored_linkset(const store::DocumentStore& store, const std::string& pid) {
  try {
    return linked::load_linkset(store.get("models", pid + ".linkset").json().value("csv", ""));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotFound) return std::nullopt;
    throw;
  }
}

Json warnings_json(const std::vector<ingest::ParseWarning>& warnings) {
  Json out = Json::array();
  for (const auto& w : warnings) out.push_back({{"line", w.line}, {"column", w.column}, {"message", w.message}});
  return out;
}

Json issues_json(const ValidationReport& report) {
  Json issues = Json::array();
  for (const ValidationIssue& i : report.issues) {
    if (i.severity == Severity::Error) issues.push_back({{"path", i.path}, {"message", i.message}});
  }
  return issues;
}

// Every imported document gets a fresh id; references follow.
void remap_ids(ingest::ProjectData& data, const std::string& pid) {
  std::map<std::string, std::string> asset_ids;
  for (MediaAsset& a : data.assets) {
    const std::string fresh = new_id();
    asset_ids[a.id] = fresh;
    a.id = fresh;
    a.project_id = pid;
  }
  auto asset = [&](const std::string& old) {
    auto it = asset_ids.find(old);
    return it == asset_ids.end() ? old : it->second;
  };
  for (LexicalEntry& e : data.entries) {
    e.id = new_id();
    e.project_id = pid;
    for (auto& m : e.media) m = asset(m);
  }
  for (IGTDocument& t : data.texts) {
    t.id = new_id();
    t.project_id = pid;
    for (Utterance& u : t.utterances) {
      u.id = new_id();
      if (u.media_ref) u.media_ref->asset_id = asset(u.media_ref->asset_id);
    }
  }
}

}  // namespace

Json import_into_project(store::DocumentStore& store, const Project& project, std::string_view format,
                         std::string_view body, const ImportOptions& options) {
  const std::string& pid = project.id;
  std::vector<LexicalEntry> entries;
  std::vector<IGTDocument> texts;
  std::vector<MediaAsset> assets;
  Json warnings = Json::array();
  if (format == "sfm") {
    auto r = ingest::parse_sfm_lexicon(body, {pid});
    entries = std::move(r.entries);
    warnings = warnings_json(r.warnings);
  } else if (format == "csv") {
    entries = ingest::import_csv(body, pid);
  } else if (format == "igt") {
    ingest::IgtOptions opt;
    opt.project_id = pid;
    opt.title = options.title;
    opt.translation_lang = options.translation_lang;
    auto r = ingest::parse_igt_text(body, opt);
    texts.push_back(std::move(r.doc));
    warnings = warnings_json(r.warnings);
  } else if (format == "json") {
    ingest::ProjectData data = ingest::import_json(body);
    remap_ids(data, pid);
    entries = std::move(data.entries);
    texts = std::move(data.texts);
    assets = std::move(data.assets);
  } else {
    throw Error(ErrorCode::UnsupportedFormat, "import format must be one of: sfm, csv, json, igt");
  }

  const std::string now = now_rfc3339();
  Json skipped = Json::array();
  std::size_t imported_entries = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    LexicalEntry& e = entries[i];
    e.project_id = pid;
    if (e.id.empty()) e.id = new_id();
    if (e.created_at.empty()) e.created_at = now;
    if (e.modified_at.empty()) e.modified_at = now;
    const ValidationReport report = validate_entry(e, project);
    if (!report.ok) {
      skipped.push_back({{"kind", "entry"}, {"index", i}, {"label", e.headword}, {"issues", issues_json(report)}});
      continue;
    }
    store.put("entries", codec::to_json(e));
    ++imported_entries;
  }
  for (const MediaAsset& a : assets) store.put("assets", codec::to_json(a));
  std::size_t imported_texts = 0;
  Json ids = Json::array();
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const ValidationReport report = validate_text(texts[i]);
    if (!report.ok) {
      skipped.push_back({{"kind", "text"}, {"index", i}, {"label", texts[i].title}, {"issues", issues_json(report)}});
      continue;
    }
    store.put("texts", codec::to_json(texts[i]));
    ids.push_back(texts[i].id);
    ++imported_texts;
  }
  return Json{{"entries", imported_entries}, {"texts", imported_texts}, {"text_ids", ids},
              {"assets", assets.size()},     {"skipped", skipped},        {"warnings", warnings}};
}

ExportedFile export_project(const store::DocumentStore& store, const Project& project, std::string_view format,
                            const std::string& base_iri) {
  const std::string& pid = project.id;
  ExportedFile out;
  std::string ext;
  if (format == "json") {
    ingest::ProjectData data;
    data.project = project;
    data.entries = project_entries(store, pid);
    data.texts = project_texts(store, pid);
    store::QueryFilter f;
    f.project_id = pid;
    for (const auto& d : store.scan("assets", f)) data.assets.push_back(codec::asset_from_json(d.json()));
    out.media_type = "application/json";
    out.body = ingest::export_json(data);
    ext = "json";
  } else if (format == "csv") {
    out.media_type = "text/csv; charset=utf-8";
    out.body = ingest::export_csv(project_entries(store, pid));
    ext = "csv";
  } else if (format == "sfm") {
    out.media_type = "text/plain; charset=utf-8";
    out.body = ingest::serialize_sfm_lexicon(project_entries(store, pid));
    ext = "sfm";
  } else if (format == "ontolex-ttl" || format == "ligt-ttl" || format == "nt") {
    const linked::MappingContext ctx = linked::make_context(project, base_iri);
    rdf::Graph graph;
    linked::Warnings warnings;
    if (format != "ligt-ttl") {
      const auto links = stored_linkset(store, pid);
      graph.merge(linked::lexicon_to_ontolex(project_entries(store, pid), ctx, links ? &*links : nullptr, &warnings));
    }
    if (format != "ontolex-ttl") graph.merge(linked::texts_to_ligt(project_texts(store, pid), ctx));
    if (format == "nt") {
      out.media_type = "application/n-triples";
      out.body = rdf::serialize_ntriples(graph);
      ext = "nt";
    } else {
      out.media_type = "text/turtle";
      out.body = rdf::serialize_turtle(graph, linked::prefix_table(ctx));
      ext = "ttl";
    }
    out.mapping_warnings = warnings.size();
  } else {
    throw Error(ErrorCode::UnsupportedFormat,
                "unsupported export format '" + std::string(format) +
                    "'; supported: RDF (ontolex-ttl, ligt-ttl, nt), JSON (json), CSV (csv), SFM (sfm)");
  }
  out.filename = (format == "ligt-ttl" ? project.slug + "-texts" : project.slug) + "." + ext;
  return out;
}

// Per-request dispatcher; owns no state beyond the request.
class Router {
 public:
  Router(Service& svc, const Request& req) : svc_(svc), req_(req), store_(*svc.store_) {}

  Response run() {
    if (!text::starts_with(req_.path, kApiPrefix)) return serve_static();
    const auto parts = split_path(std::string_view(req_.path).substr(kApiPrefix.size()));
    if (parts.empty()) throw not_found();
    const std::string_view head = parts[0];
    if (head == "health" && parts.size() == 1) {
      if (req_.method != "GET") throw method_not_allowed();
      return json_response(200, Json{{"status", "ok"}});
    }
    if (head == "auth" && parts.size() == 2) return auth_routes(parts[1]);
    if (head == "media" && parts.size() == 2) return media_blob(std::string(parts[1]));
    if (head == "projects") return project_routes(parts);
    throw not_found();
  }

 private:
  // ---- helpers -----------------------------------------------------------

  static HttpError not_found() { return {404, "NotFound", "no such resource"}; }
  HttpError method_not_allowed() const {
    return {405, "MethodNotAllowed", "method " + req_.method + " not allowed on " + req_.path};
  }

  bool is(std::string_view m) const { return req_.method == m; }

  std::string authorize(const std::string& pid, Action action) {
    return svc_.auth_.authorize(bearer_token(req_), pid, action);
  }

  Project load_project(const std::string& pid) {
    const store::Document d = store_.get("projects", pid);
    Project p = codec::project_from_json(d.json());
    p.rev = d.rev;
    return p;
  }

  store::Document owned(std::string_view collection, const std::string& id, const std::string& pid) {
    store::Document d = store_.get(collection, id);
    const Json j = d.json();
    if (j.value("project_id", "") != pid) {
      throw Error(ErrorCode::NotFound, "no document '" + id + "' in this project");
    }
    return d;
  }

  std::vector<store::Document> all(std::string_view collection, const std::string& pid) {
    store::QueryFilter f;
    f.project_id = pid;
    return store_.scan(collection, f);
  }

  std::vector<LexicalEntry> entries_of(const std::string& pid) { return project_entries(store_, pid); }
  std::vector<IGTDocument> texts_of(const std::string& pid) { return project_texts(store_, pid); }
  std::vector<Utterance> utterances_of(const std::string& pid) { return project_utterances(store_, pid); }

  void check_text(const IGTDocument& t) {
    const ValidationReport report = validate_text(t);
    if (!report.ok) throw ValidationFailed{validation_failed(report)};
  }

  std::string require_rev(const Json* body = nullptr) {
    auto rev = requested_rev(req_, body);
    if (!rev) throw Error(ErrorCode::InvalidArgument, "this write needs the current rev (If-Match header or rev)");
    return *rev;
  }

  // ---- auth ----------------------------------------------------------------

  Response auth_routes(std::string_view action) {
    if (action == "login") {
      if (!is("POST")) throw method_not_allowed();
      const Json b = body_object(req_);
      const std::string username = b.value("username", "");
      const std::string password = b.value("password", "");
      const auth::Session s = svc_.auth_.authenticate(username, password);
      return json_response(200, Json{{"token", s.token}, {"user_id", s.user_id}, {"expires_at", s.expires_at}});
    }
    if (action == "logout") {
      if (!is("POST")) throw method_not_allowed();
      const std::string token = bearer_token(req_);
      svc_.auth_.resolve(token);
      svc_.auth_.revoke(token);
      Response r;
      r.status = 204;
      return r;
    }
    if (action == "me") {
      if (!is("GET")) throw method_not_allowed();
      const std::string uid = svc_.auth_.resolve(bearer_token(req_));
      return json_response(200, public_user(svc_.auth_.get_user(uid)));
    }
    throw not_found();
  }

  // ---- projects ------------------------------------------------------------

  Response project_routes(const std::vector<std::string_view>& parts) {
    if (parts.size() == 1) {
      if (is("GET")) return list_projects();
      if (is("POST")) return create_project();
      throw method_not_allowed();
    }
    const std::string pid(parts[1]);
    if (parts.size() == 2) {
      if (is("GET")) {
        authorize(pid, Action::Read);
        const Project p = load_project(pid);
        return json_response(200, with_rev(codec::to_json(p), p.rev));
      }
      if (is("PUT")) return update_project(pid);
      if (is("DELETE")) return delete_project(pid);
      throw method_not_allowed();
    }
    const std::string_view family = parts[2];
    if (family == "members") return member_routes(pid, parts);
    if (family == "entries") return entry_routes(pid, parts);
    if (family == "texts") return text_routes(pid, parts);
    if (family == "media" && parts.size() == 3) return media_routes(pid);
    if (family == "gloss" && parts.size() == 4) return gloss_routes(pid, parts[3]);
    if (parts.size() == 3) {
      if (family == "linkset") return linkset_routes(pid);
      if (family == "import") {
        if (!is("POST")) throw method_not_allowed();
        return import_data(pid);
      }
      if (family == "export") {
        if (!is("GET")) throw method_not_allowed();
        return export_data(pid);
      }
      if (family == "sketch") {
        if (!is("GET")) throw method_not_allowed();
        authorize(pid, Action::Read);
        const auto corpus = utterances_of(pid);
        return json_response(200, gloss::to_json(gloss::sketch_summary(corpus, *svc_.model(pid))));
      }
      if (family == "dictionary") {
        if (!is("GET")) throw method_not_allowed();
        return dictionary(pid);
      }
    }
    throw not_found();
  }

  Response list_projects() {
    const std::string uid = svc_.auth_.resolve(bearer_token(req_));
    Json items = Json::array();
    for (const auto& d : store_.scan("projects", {})) {
      Project p = codec::project_from_json(d.json());
      if (!p.members.count(uid)) continue;
      items.push_back(with_rev(codec::to_json(p), d.rev));
    }
    return json_response(200, Json{{"items", items}, {"total", items.size()}});
  }

  bool slug_taken(const std::string& slug, const std::string& except_id) {
    store::QueryFilter f;
    f.field_equals.emplace_back("slug", slug);
    for (const auto& d : store_.scan("projects", f)) {
      if (d.id != except_id) return true;
    }
    return false;
  }

  void apply_project_fields(Project& p, const Json& b) {
    Json merged = codec::to_json(p);
    for (const char* key : {"name", "slug", "language_name", "language_code", "alphabet", "pos_inventory"}) {
      if (auto it = b.find(key); it != b.end()) merged[key] = *it;
    }
    Project updated = codec::project_from_json(merged);
    updated.members = p.members;
    updated.id = p.id;
    updated.created_at = p.created_at;
    updated.rev = p.rev;
    updated.alphabet.erase(std::remove_if(updated.alphabet.begin(), updated.alphabet.end(),
                                          [](const std::string& s) { return s.empty(); }),
                           updated.alphabet.end());
    for (auto& unit : updated.alphabet) unit = text::nfc(unit);
    p = std::move(updated);
  }

  Response create_project() {
    const std::string uid = svc_.auth_.resolve(bearer_token(req_));
    const Json b = body_object(req_);
    Project p;
    p.id = new_id();
    p.created_at = now_rfc3339();
    p.name = b.value("name", "");
    p.members[uid] = Role::Owner;
    apply_project_fields(p, b);
    if (p.slug.empty() && !text::trim(p.name).empty()) p.slug = slugify(p.name);
    const ValidationReport report = validate_project(p);
    if (!report.ok) throw ValidationFailed{validation_failed(report)};
    std::lock_guard lock(project_mutex());
    if (slug_taken(p.slug, p.id)) throw Error(ErrorCode::Conflict, "slug '" + p.slug + "' is already used");
    const std::string rev = store_.put("projects", codec::to_json(p));
    return json_response(201, with_rev(codec::to_json(p), rev));
  }

  Response update_project(const std::string& pid) {
    authorize(pid, Action::Admin);
    const Json b = body_object(req_);
    const std::string rev = require_rev(&b);
    Project p = load_project(pid);
    apply_project_fields(p, b);
    const ValidationReport report = validate_project(p);
    if (!report.ok) throw ValidationFailed{validation_failed(report)};
    std::lock_guard lock(project_mutex());
    if (slug_taken(p.slug, p.id)) throw Error(ErrorCode::Conflict, "slug '" + p.slug + "' is already used");
    const std::string new_rev = store_.put("projects", codec::to_json(p), rev);
    return json_response(200, with_rev(codec::to_json(p), new_rev));
  }

  Response delete_project(const std::string& pid) {
    authorize(pid, Action::Admin);
    const std::string rev = require_rev();
    store_.remove("projects", pid, rev);
    for (const char* coll : {"entries", "texts", "assets"}) {
      for (const auto& d : all(coll, pid)) {
        try {
          store_.remove(coll, d.id, d.rev);
        } catch (const Error&) {
          // Concurrently changed or removed; the project is already gone.
        }
      }
    }
    for (const std::string& id : {pid, pid + ".predictions", pid + ".linkset"}) {
      try {
        store_.remove("models", id, store_.get("models", id).rev);
      } catch (const Error&) {
      }
    }
    {
      std::lock_guard lock(svc_.models_mutex_);
      svc_.models_.erase(pid);
    }
    Response r;
    r.status = 204;
    return r;
  }

  static std::mutex& project_mutex() {
    static std::mutex m;
    return m;
  }

  // ---- members -------------------------------------------------------------

  Response members_json(const Project& p, int status) {
    Json items = Json::array();
    for (const auto& [uid, role] : p.members) {
      Json m{{"user_id", uid}, {"role", to_string(role)}};
      try {
        m["username"] = svc_.auth_.get_user(uid).username;
      } catch (const Error&) {
        m["username"] = "";
      }
      items.push_back(m);
    }
    return json_response(status, Json{{"items", items}, {"rev", p.rev}});
  }

  Response member_routes(const std::string& pid, const std::vector<std::string_view>& parts) {
    if (parts.size() == 3) {
      if (is("GET")) {
        authorize(pid, Action::Read);
        return members_json(load_project(pid), 200);
      }
      if (!is("POST")) throw method_not_allowed();
      authorize(pid, Action::Admin);
      const Json b = body_object(req_);
      std::string uid = b.value("user_id", "");
      if (uid.empty()) {
        const auto user = svc_.auth_.find_user(b.value("username", ""));
        if (!user) throw Error(ErrorCode::NotFound, "no such user");
        uid = user->id;
      } else {
        svc_.auth_.get_user(uid);
      }
      const auto role = parse_role(b.value("role", ""));
      if (!role) throw Error(ErrorCode::InvalidArgument, "role must be owner, editor or viewer");
      Project p = load_project(pid);
      const std::string rev = requested_rev(req_, &b).value_or(p.rev);
      if (p.members.count(uid)) throw Error(ErrorCode::Conflict, "user is already a member");
      p.members[uid] = *role;
      p.rev = store_.put("projects", codec::to_json(p), rev);
      return members_json(p, 201);
    }
    if (parts.size() != 4) throw not_found();
    const std::string uid(parts[3]);
    if (!is("PUT") && !is("DELETE")) throw method_not_allowed();
    authorize(pid, Action::Admin);
    const Json b = is("PUT") ? body_object(req_) : Json::object();
    Project p = load_project(pid);
    const std::string rev = requested_rev(req_, &b).value_or(p.rev);
    if (!p.members.count(uid)) throw Error(ErrorCode::NotFound, "user is not a member");
    if (is("PUT")) {
      const auto role = parse_role(b.value("role", ""));
      if (!role) throw Error(ErrorCode::InvalidArgument, "role must be owner, editor or viewer");
      p.members[uid] = *role;
    } else {
      p.members.erase(uid);
    }
    const bool has_owner = std::any_of(p.members.begin(), p.members.end(),
                                       [](const auto& m) { return m.second == Role::Owner; });
    if (!has_owner) throw Error(ErrorCode::Conflict, "a project must keep at least one owner");
    p.rev = store_.put("projects", codec::to_json(p), rev);
    return members_json(p, 200);
  }

  // ---- entries -------------------------------------------------------------

  LexicalEntry entry_from_body(const Json& b, const std::string& id, const std::string& pid) {
    Json j = b;
    j.erase("rev");
    j["id"] = id;
    j["project_id"] = pid;
    LexicalEntry e = codec::entry_from_json(j);
    e.headword = text::nfc(text::trim(e.headword));
    return e;
  }

  Response entry_routes(const std::string& pid, const std::vector<std::string_view>& parts) {
    if (parts.size() == 3) {
      if (is("GET")) {
        authorize(pid, Action::Read);
        const Project p = load_project(pid);
        store::QueryFilter f;
        f.project_id = pid;
        if (auto q = req_.param("q"); q && !q->empty()) {
          f.headword_prefix = text::nfc(*q);
          f.alphabet = p.alphabet;
        }
        if (auto pos = req_.param("pos"); pos && !pos->empty()) f.field_equals.emplace_back("pos", *pos);
        f.page.offset = parse_size(req_.param("offset"), 0, "offset");
        f.page.limit = parse_size(req_.param("limit"), 50, "limit");
        const store::QueryResult r = store_.query("entries", f);
        Json items = Json::array();
        for (const auto& d : r.documents) items.push_back(with_rev(d.json(), d.rev));
        return json_response(200, Json{{"items", items},
                                       {"total", r.total},
                                       {"offset", f.page.offset},
                                       {"limit", f.page.limit}});
      }
      if (!is("POST")) throw method_not_allowed();
      authorize(pid, Action::Write);
      const Json b = body_object(req_);
      std::string id = b.value("id", "");
      if (id.empty()) id = new_id();
      LexicalEntry e = entry_from_body(b, id, pid);
      e.created_at = e.modified_at = now_rfc3339();
      const ValidationReport report = validate_entry(e, load_project(pid));
      if (!report.ok) throw ValidationFailed{validation_failed(report)};
      try {
        store_.get("entries", id);
        throw Error(ErrorCode::Conflict, "entry " + id + " already exists");
      } catch (const Error& err) {
        if (err.code() != ErrorCode::NotFound) throw;
      }
      const std::string rev = store_.put("entries", codec::to_json(e));
      return json_response(201, with_rev(codec::to_json(e), rev));
    }
    if (parts.size() != 4) throw not_found();
    const std::string eid(parts[3]);
    if (is("GET")) {
      authorize(pid, Action::Read);
      const store::Document d = owned("entries", eid, pid);
      return json_response(200, with_rev(d.json(), d.rev));
    }
    if (is("PUT")) {
      authorize(pid, Action::Write);
      const Json b = body_object(req_);
      const std::string rev = require_rev(&b);
      const store::Document current = owned("entries", eid, pid);
      LexicalEntry e = entry_from_body(b, eid, pid);
      e.created_at = current.json().value("created_at", "");
      e.modified_at = now_rfc3339();
      const ValidationReport report = validate_entry(e, load_project(pid));
      if (!report.ok) throw ValidationFailed{validation_failed(report)};
      const std::string new_rev = store_.put("entries", codec::to_json(e), rev);
      return json_response(200, with_rev(codec::to_json(e), new_rev));
    }
    if (is("DELETE")) {
      authorize(pid, Action::Write);
      const std::string rev = require_rev();
      owned("entries", eid, pid);
      store_.remove("entries", eid, rev);
      Response r;
      r.status = 204;
      return r;
    }
    throw method_not_allowed();
  }

  // ---- texts and utterances --------------------------------------------------

  Utterance utterance_from_body(const Json& b, const std::string& id) {
    Json j = b;
    j.erase("rev");
    j["id"] = id;
    return codec::utterance_from_json(j);
  }

  IGTDocument text_from_body(const Json& b, const std::string& id, const std::string& pid) {
    Json j = b;
    j.erase("rev");
    j["id"] = id;
    j["project_id"] = pid;
    if (!j.contains("utterances")) j["utterances"] = Json::array();
    if (j["utterances"].is_array()) {
      for (Json& u : j["utterances"]) {
        if (u.is_object() && !u.contains("id")) u["id"] = new_id();
      }
    }
    return codec::text_from_json(j);
  }

  IGTDocument load_text(const std::string& tid, const std::string& pid) {
    const store::Document d = owned("texts", tid, pid);
    IGTDocument t = codec::text_from_json(d.json());
    t.rev = d.rev;
    return t;
  }

  Json text_summary(const IGTDocument& t) {
    return Json{{"id", t.id}, {"title", t.title}, {"utterance_count", t.utterances.size()}, {"rev", t.rev}};
  }

  Response text_routes(const std::string& pid, const std::vector<std::string_view>& parts) {
    if (parts.size() == 3) {
      if (is("GET")) {
        authorize(pid, Action::Read);
        Json items = Json::array();
        for (const auto& t : texts_of(pid)) items.push_back(text_summary(t));
        return json_response(200, Json{{"items", items}, {"total", items.size()}});
      }
      if (!is("POST")) throw method_not_allowed();
      authorize(pid, Action::Write);
      const Json b = body_object(req_);
      IGTDocument t = text_from_body(b, new_id(), pid);
      check_text(t);
      const std::string rev = store_.put("texts", codec::to_json(t));
      return json_response(201, with_rev(codec::to_json(t), rev));
    }
    const std::string tid(parts[3]);
    if (parts.size() == 4) {
      if (is("GET")) {
        authorize(pid, Action::Read);
        const IGTDocument t = load_text(tid, pid);
        return json_response(200, with_rev(codec::to_json(t), t.rev));
      }
      if (is("PUT")) {
        authorize(pid, Action::Write);
        const Json b = body_object(req_);
        const std::string rev = require_rev(&b);
        load_text(tid, pid);
        IGTDocument t = text_from_body(b, tid, pid);
        check_text(t);
        const std::string new_rev = store_.put("texts", codec::to_json(t), rev);
        return json_response(200, with_rev(codec::to_json(t), new_rev));
      }
      if (is("DELETE")) {
        authorize(pid, Action::Write);
        const std::string rev = require_rev();
        load_text(tid, pid);
        store_.remove("texts", tid, rev);
        Response r;
        r.status = 204;
        return r;
      }
      throw method_not_allowed();
    }
    if (parts[4] != "utterances" || parts.size() > 6) throw not_found();
    return utterance_routes(pid, tid, parts);
  }

  Response utterance_routes(const std::string& pid, const std::string& tid, const std::vector<std::string_view>& parts) {
    if (parts.size() == 5) {
      if (is("GET")) {
        authorize(pid, Action::Read);
        const IGTDocument t = load_text(tid, pid);
        Json items = Json::array();
        for (const auto& u : t.utterances) items.push_back(codec::to_json(u));
        return json_response(200, Json{{"items", items}, {"rev", t.rev}});
      }
      if (!is("POST")) throw method_not_allowed();
      authorize(pid, Action::Write);
      const Json b = body_object(req_);
      IGTDocument t = load_text(tid, pid);
      const std::string rev = requested_rev(req_, &b).value_or(t.rev);
      std::string uid = b.value("id", "");
      if (uid.empty()) uid = new_id();
      const Utterance u = utterance_from_body(b, uid);
      t.utterances.push_back(u);
      check_text(t);
      const std::string new_rev = store_.put("texts", codec::to_json(t), rev);
      return json_response(201, Json{{"utterance", codec::to_json(u)}, {"rev", new_rev}});
    }
    const std::string uid(parts[5]);
    if (!is("GET") && !is("PUT") && !is("DELETE")) throw method_not_allowed();
    authorize(pid, is("GET") ? Action::Read : Action::Write);
    const Json b = is("PUT") ? body_object(req_) : Json::object();
    IGTDocument t = load_text(tid, pid);
    auto it = std::find_if(t.utterances.begin(), t.utterances.end(), [&](const Utterance& u) { return u.id == uid; });
    if (it == t.utterances.end()) throw Error(ErrorCode::NotFound, "no utterance " + uid + " in this text");
    if (is("GET")) return json_response(200, Json{{"utterance", codec::to_json(*it)}, {"rev", t.rev}});

    const std::string rev = require_rev(&b);
    Json out = Json::object();
    if (is("PUT")) {
      *it = utterance_from_body(b, uid);
      out["utterance"] = codec::to_json(*it);
    } else {
      t.utterances.erase(it);
    }
    check_text(t);
    const std::string new_rev = store_.put("texts", codec::to_json(t), rev);
    if (is("DELETE")) {
      Response r;
      r.status = 204;
      return r;
    }
    out["rev"] = new_rev;
    return json_response(200, out);
  }

  // ---- media ---------------------------------------------------------------

  Response media_routes(const std::string& pid) {
    if (is("GET")) {
      authorize(pid, Action::Read);
      Json items = Json::array();
      for (const auto& d : all("assets", pid)) items.push_back(d.json());
      return json_response(200, Json{{"items", items}, {"total", items.size()}});
    }
    if (!is("POST")) throw method_not_allowed();
    authorize(pid, Action::Write);
    const UploadedFile* file = nullptr;
    for (const auto& f : req_.files) {
      if (f.field == "file") file = &f;
    }
    if (!file && !req_.files.empty()) file = &req_.files.front();
    if (!file) throw Error(ErrorCode::InvalidArgument, "expected a multipart field named 'file'");
    if (file->content.size() > svc_.config_.max_upload_bytes) {
      throw Error(ErrorCode::PayloadTooLarge, "upload exceeds " + std::to_string(svc_.config_.max_upload_bytes) + " bytes");
    }
    if (file->content.empty()) throw Error(ErrorCode::InvalidArgument, "uploaded file is empty");
    const std::string mime = file->content_type.empty() ? "application/octet-stream" : file->content_type;
    const auto kind = media_kind_for_mime(mime);
    if (!kind) throw Error(ErrorCode::UnsupportedFormat, "unsupported media type '" + mime + "'");
    MediaAsset a;
    a.id = new_id();
    a.project_id = pid;
    a.kind = *kind;
    a.mime = mime;
    a.byte_size = file->content.size();
    a.sha256 = store_.put_blob(file->content);
    a.filename = file->filename;
    const std::string rev = store_.put("assets", codec::to_json(a));
    return json_response(201, with_rev(codec::to_json(a), rev));
  }

  Response media_blob(const std::string& sha) {
    if (!is("GET")) throw method_not_allowed();
    const std::string token = bearer_token(req_);
    svc_.auth_.resolve(token);
    store::QueryFilter f;
    f.field_equals.emplace_back("sha256", sha);
    const auto assets = store_.scan("assets", f);
    if (assets.empty()) throw Error(ErrorCode::NotFound, "no media with that hash");
    std::optional<Error> denied;
    for (const auto& d : assets) {
      const MediaAsset a = codec::asset_from_json(d.json());
      try {
        svc_.auth_.authorize(token, a.project_id, Action::Read);
      } catch (const Error& e) {
        if (!denied) denied = e;
        continue;
      }
      Response r;
      r.content_type = a.mime;
      r.body = store_.get_blob(sha);
      r.headers["Cache-Control"] = "private, max-age=31536000, immutable";
      return r;
    }
    throw *denied;
  }

  // ---- glosser ---------------------------------------------------------------

  Response gloss_routes(const std::string& pid, std::string_view action) {
    if (action == "suggest") {
      if (!is("POST")) throw method_not_allowed();
      authorize(pid, Action::Read);
      const Json b = body_object(req_);
      auto words = b.find("words");
      if (words == b.end() || !words->is_array()) throw SchemaError("/words", "expected an array of strings");
      const Service::Snapshot snap = svc_.snapshot(pid);
      Json out = Json::array();
      for (std::size_t i = 0; i < words->size(); ++i) {
        const Json& w = (*words)[i];
        if (!w.is_string() || text::trim(w.get<std::string>()).empty()) {
          throw SchemaError("/words/" + std::to_string(i), "expected a non-empty string");
        }
        out.push_back(gloss::to_json(gloss::suggest(*snap.model, text::trim(w.get<std::string>()),
                                                    snap.predictions.get())));
      }
      return json_response(200, Json{{"model_version", snap.model->version}, {"suggestions", out}});
    }
    if (action == "retrain") {
      if (!is("POST")) throw method_not_allowed();
      authorize(pid, Action::Write);
      const std::int64_t version = svc_.retrain(pid);
      return json_response(200, Json{{"version", version}});
    }
    if (action == "predictions") {
      if (!is("POST")) throw method_not_allowed();
      authorize(pid, Action::Write);
      auto predictions = gloss::import_predictions(req_.body);
      const std::size_t n = predictions.size();
      put_internal("models", Json{{"id", pid + ".predictions"}, {"project_id", pid}, {"jsonl", req_.body}});
      Service::Snapshot snap = svc_.snapshot(pid);
      snap.predictions = std::make_shared<const gloss::ExternalPredictions>(gloss::index_predictions(std::move(predictions)));
      svc_.install(pid, snap);
      return json_response(200, Json{{"imported", n}});
    }
    if (action == "model") {
      if (!is("GET")) throw method_not_allowed();
      authorize(pid, Action::Read);
      const Service::Snapshot snap = svc_.snapshot(pid);
      return json_response(200, Json{{"version", snap.model->version},
                                     {"trained_on", snap.model->trained_on},
                                     {"total_morph_tokens", snap.model->total_morph_tokens},
                                     {"forms", snap.model->morph_counts.size()},
                                     {"predictions", snap.predictions ? snap.predictions->size() : 0}});
    }
    if (action == "training-data") {
      if (!is("GET")) throw method_not_allowed();
      authorize(pid, Action::Read);
      Response r;
      r.content_type = "application/x-ndjson";
      r.body = gloss::export_training_data(utterances_of(pid));
      return r;
    }
    throw not_found();
  }

  // Server-managed documents: last writer wins.
  void put_internal(std::string_view collection, const Json& doc) {
    const std::string id = doc.at("id").get<std::string>();
    for (int attempt = 0;; ++attempt) {
      std::optional<std::string> rev;
      try {
        rev = store_.get(collection, id).rev;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotFound) throw;
      }
      try {
        store_.put(collection, doc, rev);
        return;
      } catch (const StaleRevisionError&) {
        if (attempt >= 8) throw;
      }
    }
  }

  // ---- linkset, import, export, dictionary --------------------------------

  Response linkset_routes(const std::string& pid) {
    if (is("GET")) {
      authorize(pid, Action::Read);
      Response r;
      r.content_type = "text/csv; charset=utf-8";
      try {
        r.body = store_.get("models", pid + ".linkset").json().value("csv", "");
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotFound) throw;
      }
      return r;
    }
    if (!is("PUT")) throw method_not_allowed();
    authorize(pid, Action::Write);
    const linked::LinkSet set = linked::load_linkset(req_.body);
    put_internal("models", Json{{"id", pid + ".linkset"}, {"project_id", pid}, {"csv", req_.body}});
    return json_response(200, Json{{"records", set.records.size()}});
  }

  Response import_data(const std::string& pid) {
    authorize(pid, Action::Write);
    ImportOptions opt;
    if (auto t = req_.param("title")) opt.title = *t;
    if (auto l = req_.param("translation_lang")) opt.translation_lang = *l;
    const std::string format = req_.param("format").value_or("");
    return json_response(200, import_into_project(store_, load_project(pid), format, req_.body, opt));
  }

  Response export_data(const std::string& pid) {
    authorize(pid, Action::Read);
    const std::string format = req_.param("format").value_or("");
    const auto& formats = export_formats();
    if (std::find(formats.begin(), formats.end(), format) == formats.end()) {
      Json supported = Json::array();
      for (const auto& f : formats) supported.push_back(f);
      return error_response(400, to_string(ErrorCode::UnsupportedFormat),
                            "unsupported export format '" + format +
                                "'; supported: RDF (ontolex-ttl, ligt-ttl, nt), JSON (json), CSV (csv), SFM (sfm)",
                            Json{{"supported", supported}});
    }
    const ExportedFile file = export_project(store_, load_project(pid), format, svc_.config_.base_iri);
    Response r;
    r.content_type = file.media_type;
    r.body = file.body;
    r.headers["Content-Disposition"] = "attachment; filename=\"" + file.filename + "\"";
    if (file.mapping_warnings) r.headers["X-Life-Mapping-Warnings"] = std::to_string(file.mapping_warnings);
    return r;
  }

  Response dictionary(const std::string& pid) {
    authorize(pid, Action::Read);
    const Project project = load_project(pid);
    const auto doc = dict::compile_dictionary(entries_of(pid), project);
    const std::string format = req_.param("format").value_or("json");
    Response r;
    if (format == "json") {
      r.body = codec::canonical(dict::to_json(doc));
    } else if (format == "html") {
      r.content_type = "text/html; charset=utf-8";
      r.body = dict::render_html(doc);
    } else if (format == "print") {
      r.content_type = "text/plain; charset=utf-8";
      r.body = dict::render_print(doc);
      r.headers["Content-Disposition"] = "attachment; filename=\"" + project.slug + ".adoc\"";
    } else {
      throw Error(ErrorCode::UnsupportedFormat, "dictionary format must be json, html or print");
    }
    return r;
  }

  // ---- static assets -------------------------------------------------------

  Response serve_static() {
    if (!is("GET") && !is("HEAD")) throw method_not_allowed();
    if (svc_.config_.static_dir.empty()) throw not_found();
    const std::filesystem::path root(svc_.config_.static_dir);
    std::filesystem::path rel;
    for (std::string_view seg : split_path(req_.path)) {
      if (seg == ".." || seg == "." || seg.find('\\') != std::string_view::npos) throw not_found();
      rel /= std::string(seg);
    }
    std::filesystem::path file = root / rel;
    std::error_code ec;
    if (rel.empty() || std::filesystem::is_directory(file, ec)) file /= "index.html";
    auto body = read_file(file);
    // Client-side routes fall back to the application shell.
    if (!body && !rel.has_extension()) {
      file = root / "index.html";
      body = read_file(file);
    }
    if (!body) throw not_found();
    Response r;
    r.content_type = mime_for_path(file);
    r.body = is("HEAD") ? std::string() : std::move(*body);
    return r;
  }

  Service& svc_;
  const Request& req_;
  store::DocumentStore& store_;
};

Service::Service(std::shared_ptr<store::DocumentStore> store, ServiceConfig config,
                 std::function<std::int64_t()> clock)
    : store_(std::move(store)),
      config_(std::move(config)),
      auth_(store_, auth::AuthOptions{auth::KdfProfile::named(config_.kdf), config_.session_ttl_seconds,
                                      config_.secret, std::move(clock)}) {}

Response Service::handle(const Request& request) {
  try {
    return Router(*this, request).run();
  } catch (const HttpError& e) {
    return error_response(e.status, e.code, e.message);
  } catch (const ValidationFailed& v) {
    return v.response;
  } catch (const StaleRevisionError& e) {
    return error_response(409, to_string(e.code()), e.what(), Json{{"current_rev", e.current_rev()}});
  } catch (const ParseError& e) {
    return error_response(400, to_string(e.code()), e.what(), Json{{"line", e.line()}, {"column", e.column()}});
  } catch (const SchemaError& e) {
    return error_response(400, to_string(e.code()), e.what(), Json{{"where", e.where()}});
  } catch (const Error& e) {
    return error_response(status_for(e.code()), to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", e.what());
  }
}

Service::Snapshot Service::snapshot(const std::string& project_id) {
  {
    std::lock_guard lock(models_mutex_);
    if (auto it = models_.find(project_id); it != models_.end()) return it->second;
  }
  Snapshot snap;
  try {
    snap.model = std::make_shared<const gloss::GlossModel>(gloss::model_from_json(store_->get("models", project_id).json()));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotFound) throw;
    gloss::GlossModel empty;
    empty.project_id = project_id;
    snap.model = std::make_shared<const gloss::GlossModel>(std::move(empty));
  }
  try {
    const std::string jsonl = store_->get("models", project_id + ".predictions").json().value("jsonl", "");
    snap.predictions =
        std::make_shared<const gloss::ExternalPredictions>(gloss::index_predictions(gloss::import_predictions(jsonl)));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotFound) throw;
  }
  std::lock_guard lock(models_mutex_);
  // Another thread may have loaded or installed one meanwhile; keep theirs.
  return models_.try_emplace(project_id, std::move(snap)).first->second;
}

void Service::install(const std::string& project_id, Snapshot snap) {
  std::lock_guard lock(models_mutex_);
  models_[project_id] = std::move(snap);
}

std::shared_ptr<const gloss::GlossModel> Service::model(const std::string& project_id) {
  return snapshot(project_id).model;
}

std::int64_t Service::retrain(const std::string& project_id) {
  std::lock_guard retrain_lock(retrain_mutex_);
  store::QueryFilter f;
  f.project_id = project_id;
  std::vector<Utterance> corpus;
  for (const auto& d : store_->scan("texts", f)) {
    for (auto& u : codec::text_from_json(d.json()).utterances) corpus.push_back(std::move(u));
  }
  std::vector<LexicalEntry> lexicon;
  for (const auto& d : store_->scan("entries", f)) lexicon.push_back(codec::entry_from_json(d.json()));

  Snapshot snap = snapshot(project_id);
  gloss::GlossModel fresh = gloss::train(corpus, lexicon, project_id);
  // Versions only move forward while there is data to learn from.
  if (fresh.version != 0) fresh.version = std::max<std::int64_t>(snap.model->version, 0) + 1;

  Json doc = gloss::to_json(fresh);
  doc["id"] = project_id;
  std::optional<std::string> rev;
  try {
    rev = store_->get("models", project_id).rev;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotFound) throw;
  }
  store_->put("models", doc, rev);
  snap.model = std::make_shared<const gloss::GlossModel>(std::move(fresh));
  const std::int64_t version = snap.model->version;
  install(project_id, std::move(snap));
  return version;
}

}  // namespace life::service
