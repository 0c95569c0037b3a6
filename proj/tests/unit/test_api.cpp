#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "api_world.hpp"
#include "life/codec.hpp"
#include "life/store.hpp"

using namespace life;
using codec::Json;
using testsupport::ApiResult;
using testsupport::ApiWorld;

namespace {

const Json kEntry{{"headword", "kitabu"}, {"pos", "n"}, {"senses", {{{"gloss", "book"}}}}};

Json glossed_utterance(const std::string& phrase, const std::vector<std::vector<std::pair<std::string, std::string>>>& words) {
  Json ws = Json::array();
  for (const auto& morphs : words) {
    std::string surface;
    Json ms = Json::array();
    for (const auto& [form, gloss] : morphs) {
      surface += form;
      ms.push_back({{"form", form}, {"gloss", gloss}});
    }
    ws.push_back({{"surface", surface}, {"morphs", ms}});
  }
  return Json{{"phrase", phrase}, {"words", ws}, {"glossed", true}};
}

}  // namespace

TEST(Api, PermissionMatrix) {
  ApiWorld w;
  std::size_t checked = 0;
  const auto failures = testsupport::permission_sweep(w, &checked);
  EXPECT_GT(checked, 200u);
  for (const auto& f : failures) ADD_FAILURE() << f;
}

TEST(Api, HealthAndUnknownRoutes) {
  ApiWorld w;
  EXPECT_EQ(w.api().call("GET", "/api/v1/health").status, 200);
  const ApiResult post = w.api().call("POST", "/api/v1/health");
  EXPECT_EQ(post.status, 405);
  EXPECT_EQ(post.error_code(), "MethodNotAllowed");
  EXPECT_EQ(w.api().call("GET", "/api/v1/nothing").status, 404);
  EXPECT_EQ(w.api().call("PATCH", w.project_path() + "/entries", w.tokens["owner"]).status, 405);
}

TEST(Api, LoginLogoutMe) {
  ApiWorld w;
  EXPECT_EQ(w.api().json("POST", "/api/v1/auth/login", "", {{"username", "owner"}, {"password", "x"}}).status, 401);
  const std::string token = w.api().login("viewer", "viewer-pw");
  const ApiResult me = w.api().call("GET", "/api/v1/auth/me", token);
  ASSERT_EQ(me.status, 200);
  EXPECT_EQ(me.json()["username"], "viewer");
  EXPECT_FALSE(me.json().contains("password_hash"));
  EXPECT_EQ(w.api().call("POST", "/api/v1/auth/logout", token).status, 204);
  EXPECT_EQ(w.api().call("GET", "/api/v1/auth/me", token).status, 401);
  EXPECT_EQ(w.api().call("GET", "/api/v1/auth/me", w.tokens["viewer"]).status, 200);
}

TEST(Api, ProjectListingOnlyShowsMemberships) {
  ApiWorld w;
  EXPECT_EQ(w.api().call("GET", "/api/v1/projects", w.tokens["viewer"]).json()["total"], 1);
  EXPECT_EQ(w.api().call("GET", "/api/v1/projects", w.tokens["stranger"]).json()["total"], 0);
  EXPECT_EQ(w.api().call("GET", "/api/v1/projects").status, 401);
}

TEST(Api, ProjectCreationValidatesAndRejectsDuplicateSlugs) {
  ApiWorld w;
  const std::string t = w.tokens["stranger"];
  const ApiResult bad = w.api().json("POST", "/api/v1/projects", t, {{"name", ""}, {"language_code", "SW"}});
  ASSERT_EQ(bad.status, 422);
  EXPECT_EQ(bad.error_code(), "SchemaViolation");
  std::set<std::string> paths;
  const Json body = bad.json();
  for (const auto& i : body["error"]["issues"]) paths.insert(i["path"].get<std::string>());
  EXPECT_TRUE(paths.count("name"));
  EXPECT_TRUE(paths.count("language_code"));

  const ApiResult dup = w.api().json("POST", "/api/v1/projects", t, {{"name", "Kiswahili Fieldwork"}, {"language_code", "swh"}});
  EXPECT_EQ(dup.status, 409);
  const ApiResult ok = w.api().json("POST", "/api/v1/projects", t, {{"name", "Other one"}, {"language_code", "swh"}});
  ASSERT_EQ(ok.status, 201);
  EXPECT_EQ(ok.json()["slug"], "other-one");
  EXPECT_EQ(ok.json()["members"][w.user_ids["stranger"]], "owner");
}

TEST(Api, StaleRevisionReportsCurrentRev) {
  ApiWorld w;
  const std::string t = w.tokens["editor"];
  const std::string base = w.project_path() + "/entries";
  const Json created = w.api().json("POST", base, t, kEntry).json();
  const std::string id = created["id"];
  const std::string rev1 = created["rev"];

  Json edit = kEntry;
  edit["senses"][0]["gloss"] = "volume";
  edit["rev"] = rev1;
  const ApiResult first = w.api().json("PUT", base + "/" + id, t, edit);
  ASSERT_EQ(first.status, 200);
  const std::string rev2 = first.json()["rev"];
  EXPECT_NE(rev1, rev2);

  // A second writer still holding rev1 loses.
  edit["senses"][0]["gloss"] = "tome";
  const ApiResult second = w.api().json("PUT", base + "/" + id, t, edit);
  ASSERT_EQ(second.status, 409);
  EXPECT_EQ(second.error_code(), "StaleRevision");
  EXPECT_EQ(second.json()["error"]["current_rev"], rev2);
  EXPECT_EQ(w.api().call("GET", base + "/" + id, t).json()["senses"][0]["gloss"], "volume");

  // If-Match works as well as the body.
  edit.erase("rev");
  EXPECT_EQ(w.api().json("PUT", base + "/" + id, t, edit, {{"if-match", "\"" + rev2 + "\""}}).status, 200);
  EXPECT_EQ(w.api().json("PUT", base + "/" + id, t, edit).status, 400);
}

TEST(Api, EntryValidationAndQueries) {
  ApiWorld w;
  const std::string t = w.tokens["editor"];
  const std::string base = w.project_path() + "/entries";
  const ApiResult bad = w.api().json("POST", base, t, {{"headword", " "}, {"senses", Json::array()}});
  ASSERT_EQ(bad.status, 422);
  EXPECT_EQ(bad.json()["error"]["issues"].size(), 2u);
  EXPECT_EQ(w.api().call("POST", base, t, "{not json").status, 400);

  for (const char* hw : {"chai", "cha", "chakula", "bata", "ng'ombe"}) {
    Json e = kEntry;
    e["headword"] = hw;
    ASSERT_EQ(w.api().json("POST", base, t, e).status, 201);
  }
  const Json q = w.api().call("GET", base + "?q=cha", t).json();
  ASSERT_EQ(q["total"], 3);
  EXPECT_EQ(q["items"][0]["headword"], "cha");
  EXPECT_EQ(q["items"][2]["headword"], "chakula");
  const Json page = w.api().call("GET", base + "?offset=1&limit=2", t).json();
  EXPECT_EQ(page["total"], 5);
  EXPECT_EQ(page["items"].size(), 2u);
  EXPECT_EQ(w.api().call("GET", base + "?limit=0", t).status, 400);
  EXPECT_EQ(w.api().call("GET", base + "?limit=abc", t).status, 400);

  const ApiResult missing = w.api().call("GET", base + "/" + new_id(), t);
  EXPECT_EQ(missing.status, 404);
}

TEST(Api, EntriesAreScopedToTheirProject) {
  ApiWorld w;
  const std::string t = w.tokens["owner"];
  const std::string id = w.api().json("POST", w.project_path() + "/entries", t, kEntry).json()["id"];
  const std::string other =
      w.api().json("POST", "/api/v1/projects", t, {{"name", "Second"}, {"language_code", "abc"}}).json()["id"];
  EXPECT_EQ(w.api().call("GET", "/api/v1/projects/" + other + "/entries/" + id, t).status, 404);
}

TEST(Api, TextsAndUtterances) {
  ApiWorld w;
  const std::string t = w.tokens["editor"];
  const std::string base = w.project_path() + "/texts";
  const ApiResult bad = w.api().json("POST", base, t,
                                     {{"title", "x"}, {"utterances", {{{"phrase", "a b"}, {"words", {{{"surface", "a"}}}}}}}});
  ASSERT_EQ(bad.status, 422);
  EXPECT_EQ(bad.json()["error"]["issues"][0]["path"], "utterances/0/words");

  const Json text = w.api().json("POST", base, t, {{"title", "Story"}}).json();
  const std::string tid = text["id"];
  const ApiResult add = w.api().json("POST", base + "/" + tid + "/utterances", t,
                                     glossed_utterance("vitabu", {{{"vi", "PL"}, {"tabu", "book"}}}));
  ASSERT_EQ(add.status, 201);
  const std::string uid = add.json()["utterance"]["id"];
  std::string rev = add.json()["rev"];

  const Json listed = w.api().call("GET", base, t).json();
  EXPECT_EQ(listed["items"][0]["utterance_count"], 1);

  Json edit = glossed_utterance("kitabu", {{{"ki", "SG"}, {"tabu", "book"}}});
  edit["rev"] = rev;
  const ApiResult put = w.api().json("PUT", base + "/" + tid + "/utterances/" + uid, t, edit);
  ASSERT_EQ(put.status, 200);
  EXPECT_EQ(put.json()["utterance"]["id"], uid);
  rev = put.json()["rev"];
  EXPECT_EQ(w.api().call("DELETE", base + "/" + tid + "/utterances/" + new_id() + "?rev=" + rev, t).status, 404);
  EXPECT_EQ(w.api().call("DELETE", base + "/" + tid + "/utterances/" + uid + "?rev=" + rev, t).status, 204);
  EXPECT_EQ(w.api().call("GET", base + "/" + tid + "/utterances", t).json()["items"].size(), 0u);
}

TEST(Api, MediaUploadAndCap) {
  testsupport::ApiWorld w([] {
    service::ServiceConfig c;
    c.max_upload_bytes = 16;
    return c;
  }());
  const std::string t = w.tokens["editor"];
  const std::string path = w.project_path() + "/media";
  const ApiResult ok = w.api().send(testsupport::upload_request(path, t, "audio/wav", "hello"));
  ASSERT_EQ(ok.status, 201);
  EXPECT_EQ(ok.json()["kind"], "audio");
  EXPECT_EQ(ok.json()["sha256"], "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824");
  EXPECT_EQ(ok.json()["byte_size"], 5);

  const ApiResult big = w.api().send(testsupport::upload_request(path, t, "audio/wav", std::string(17, 'x')));
  EXPECT_EQ(big.status, 413);
  EXPECT_EQ(big.error_code(), "PayloadTooLarge");
  EXPECT_EQ(w.api().send(testsupport::upload_request(path, t, "application/zip", "zip")).status, 400);
  EXPECT_EQ(w.api().send(testsupport::upload_request(path, t, "audio/wav", "")).status, 400);
  EXPECT_EQ(w.api().call("POST", path, t).status, 400);

  const ApiResult blob = w.api().call("GET", "/api/v1/media/" + ok.json()["sha256"].get<std::string>(), w.tokens["viewer"]);
  ASSERT_EQ(blob.status, 200);
  EXPECT_EQ(blob.body, "hello");
  EXPECT_EQ(blob.content_type, "audio/wav");
  EXPECT_EQ(w.api().call("GET", "/api/v1/media/" + std::string(64, '0'), t).status, 404);
}

TEST(Api, GlossRoutes) {
  ApiWorld w;
  const std::string t = w.tokens["editor"];
  const std::string base = w.project_path();
  const std::string tid = w.api().json("POST", base + "/texts", t, {{"title", "Books"}}).json()["id"];
  for (const auto& u : {glossed_utterance("vitabu", {{{"vi", "PL"}, {"tabu", "book"}}}),
                        glossed_utterance("kitabu", {{{"ki", "SG"}, {"tabu", "book"}}})}) {
    ASSERT_EQ(w.api().json("POST", base + "/texts/" + tid + "/utterances", t, u).status, 201);
  }
  EXPECT_EQ(w.api().call("GET", base + "/gloss/model", t).json()["version"], 0);
  const ApiResult retrain = w.api().call("POST", base + "/gloss/retrain", t);
  ASSERT_EQ(retrain.status, 200);
  EXPECT_EQ(retrain.json()["version"], 1);
  EXPECT_EQ(w.api().call("POST", base + "/gloss/retrain", t).json()["version"], 2);

  const Json s = w.api().json("POST", base + "/gloss/suggest", w.tokens["viewer"], {{"words", {"vitabu"}}}).json();
  EXPECT_EQ(s["model_version"], 2);
  const Json morphs = s["suggestions"][0]["morphs"];
  ASSERT_EQ(morphs.size(), 2u);
  EXPECT_EQ(morphs[0]["gloss"], "PL");
  EXPECT_EQ(morphs[1]["gloss"], "book");

  const ApiResult bad = w.api().json("POST", base + "/gloss/suggest", t, {{"words", {"ok", ""}}});
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(bad.json()["error"]["where"], "/words/1");

  const ApiResult preds = w.api().call("POST", base + "/gloss/predictions", t,
                                       "{\"word\":\"vitabu\",\"morphs\":[{\"form\":\"vitabu\",\"gloss\":\"books\"}]}\n");
  ASSERT_EQ(preds.status, 200);
  EXPECT_EQ(preds.json()["imported"], 1);
  const Json ext = w.api().json("POST", base + "/gloss/suggest", t, {{"words", {"vitabu"}}}).json();
  EXPECT_EQ(ext["suggestions"][0]["morphs"][0]["gloss"], "books");
  EXPECT_EQ(w.api().call("POST", base + "/gloss/predictions", t, "nope\n").json()["error"]["where"], "line 1");

  const ApiResult data = w.api().call("GET", base + "/gloss/training-data", t);
  EXPECT_EQ(data.content_type, "application/x-ndjson");
  EXPECT_EQ(std::count(data.body.begin(), data.body.end(), '\n'), 2);
  EXPECT_EQ(w.api().call("GET", base + "/sketch", t).status, 200);
}

TEST(Api, LinksetFeedsTheExport) {
  ApiWorld w;
  const std::string t = w.tokens["editor"];
  const std::string base = w.project_path();
  ASSERT_EQ(w.api().json("POST", base + "/entries", t, kEntry).status, 201);
  const std::string csv = "lemma,pos,target_iri\nkitabu,n,http://example.org/book\n";
  EXPECT_EQ(w.api().call("PUT", base + "/linkset", t, csv).json()["records"], 1);
  EXPECT_EQ(w.api().call("GET", base + "/linkset", t).body, csv);
  const ApiResult bad = w.api().call("PUT", base + "/linkset", t, "kitabu,n,not an iri\n");
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(bad.json()["error"]["line"], 1);

  const ApiResult nt = w.api().call("GET", base + "/export?format=nt", t);
  ASSERT_EQ(nt.status, 200);
  EXPECT_EQ(nt.content_type, "application/n-triples");
  EXPECT_NE(nt.body.find("<http://www.w3.org/ns/lemon/ontolex#reference> <http://example.org/book>"),
            std::string::npos);
}

TEST(Api, ExportFormats) {
  ApiWorld w;
  const std::string t = w.tokens["viewer"];
  const std::string base = w.project_path();
  ASSERT_EQ(w.api().json("POST", base + "/entries", w.tokens["owner"], kEntry).status, 201);
  for (const auto& [format, type] : std::vector<std::pair<std::string, std::string>>{
           {"json", "application/json"},
           {"csv", "text/csv; charset=utf-8"},
           {"sfm", "text/plain; charset=utf-8"},
           {"ontolex-ttl", "text/turtle"},
           {"ligt-ttl", "text/turtle"},
           {"nt", "application/n-triples"}}) {
    const ApiResult r = w.api().call("GET", base + "/export?format=" + format, t);
    EXPECT_EQ(r.status, 200) << format;
    EXPECT_EQ(r.content_type, type) << format;
    EXPECT_NE(r.headers.at("Content-Disposition").find("kiswahili-fieldwork"), std::string::npos) << format;
  }
  const ApiResult bad = w.api().call("GET", base + "/export?format=xml", t);
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(bad.error_code(), "UnsupportedFormat");
  EXPECT_EQ(bad.json()["error"]["supported"].size(), 6u);
}

TEST(Api, ImportThenExportRoundTrip) {
  ApiWorld w;
  const std::string t = w.tokens["owner"];
  const std::string base = w.project_path();
  const std::string sfm = "\\lx kitabu\n\\ps n\n\\ge book\n\n\\lx mti\n\\ps n\n\\ge tree\n\n\\lx bad\n";
  const ApiResult imp = w.api().call("POST", base + "/import?format=sfm", t, sfm);
  ASSERT_EQ(imp.status, 200);
  EXPECT_EQ(imp.json()["entries"], 2);
  EXPECT_EQ(imp.json()["skipped"].size(), 1u);

  const std::string igt = "\\tx vitabu\n\\mb vi-tabu\n\\gl PL-book\n\\ft books\n";
  const ApiResult texts = w.api().call("POST", base + "/import?format=igt&title=Books", t, igt);
  ASSERT_EQ(texts.status, 200);
  EXPECT_EQ(texts.json()["texts"], 1);
  const ApiResult misaligned = w.api().call("POST", base + "/import?format=igt", t, "\\tx a b\n\\mb a\n");
  EXPECT_EQ(misaligned.status, 400);
  EXPECT_EQ(misaligned.json()["error"]["line"], 2);
  EXPECT_EQ(w.api().call("POST", base + "/import?format=xml", t, "x").status, 400);

  const std::string manifest = w.api().call("GET", base + "/export?format=json", t).body;
  const std::string other =
      w.api().json("POST", "/api/v1/projects", t, {{"name", "Copy"}, {"language_code", "swh"}}).json()["id"];
  const ApiResult copy = w.api().call("POST", "/api/v1/projects/" + other + "/import?format=json", t, manifest);
  ASSERT_EQ(copy.status, 200);
  EXPECT_EQ(copy.json()["entries"], 2);
  EXPECT_EQ(copy.json()["texts"], 1);
  const Json entries = w.api().call("GET", "/api/v1/projects/" + other + "/entries", t).json();
  EXPECT_EQ(entries["total"], 2);
  for (const auto& e : entries["items"]) EXPECT_EQ(e["project_id"], other);
}

TEST(Api, DictionaryFormats) {
  ApiWorld w;
  const std::string t = w.tokens["viewer"];
  const std::string base = w.project_path();
  ASSERT_EQ(w.api().json("POST", base + "/entries", w.tokens["owner"], kEntry).status, 201);
  const ApiResult j = w.api().call("GET", base + "/dictionary", t);
  ASSERT_EQ(j.status, 200);
  EXPECT_EQ(j.json()["sections"][0]["letter"], "k");
  const ApiResult html = w.api().call("GET", base + "/dictionary?format=html", t);
  EXPECT_EQ(html.content_type, "text/html; charset=utf-8");
  EXPECT_NE(html.body.find("kitabu"), std::string::npos);
  const ApiResult print = w.api().call("GET", base + "/dictionary?format=print", t);
  EXPECT_NE(print.headers.at("Content-Disposition").find("kiswahili-fieldwork.adoc"), std::string::npos);
  EXPECT_EQ(w.api().call("GET", base + "/dictionary?format=pdf", t).status, 400);
}

TEST(Api, MembersKeepAnOwner) {
  ApiWorld w;
  const std::string t = w.tokens["owner"];
  const std::string base = w.project_path() + "/members";
  EXPECT_EQ(w.api().call("GET", base, w.tokens["viewer"]).json()["items"].size(), 3u);
  EXPECT_EQ(w.api().json("POST", base, t, {{"username", "viewer"}, {"role", "editor"}}).status, 409);
  EXPECT_EQ(w.api().json("POST", base, t, {{"username", "nobody"}, {"role", "editor"}}).status, 404);
  EXPECT_EQ(w.api().json("POST", base, t, {{"username", "stranger"}, {"role", "boss"}}).status, 400);
  const ApiResult demote = w.api().json("PUT", base + "/" + w.user_ids["owner"], t, {{"role", "editor"}});
  EXPECT_EQ(demote.status, 409);
  EXPECT_EQ(w.api().json("PUT", base + "/" + w.user_ids["viewer"], t, {{"role", "editor"}}).status, 200);
  EXPECT_EQ(w.api().json("POST", w.project_path() + "/entries", w.tokens["viewer"], kEntry).status, 201);
  EXPECT_EQ(w.api().call("DELETE", base + "/" + w.user_ids["viewer"], t).status, 200);
  EXPECT_EQ(w.api().call("GET", w.project_path(), w.tokens["viewer"]).status, 403);
}

TEST(Api, DeletingAProjectCascades) {
  ApiWorld w;
  const std::string t = w.tokens["owner"];
  ASSERT_EQ(w.api().json("POST", w.project_path() + "/entries", t, kEntry).status, 201);
  const std::string rev = w.api().call("GET", w.project_path(), t).json()["rev"];
  EXPECT_EQ(w.api().call("DELETE", w.project_path(), t).status, 400);
  EXPECT_EQ(w.api().call("DELETE", w.project_path() + "?rev=" + rev, t).status, 204);
  EXPECT_EQ(w.api().call("GET", w.project_path(), t).status, 404);
  store::QueryFilter f;
  f.project_id = w.project_id;
  EXPECT_TRUE(w.store->scan("entries", f).empty());
}

TEST(Api, StaticFilesAndSpaFallback) {
  const auto dir = std::filesystem::temp_directory_path() / ("life-static-" + new_id());
  std::filesystem::create_directories(dir / "assets");
  std::ofstream(dir / "index.html") << "<html>shell</html>";
  std::ofstream(dir / "assets" / "app.js") << "console.log(1)";
  std::ofstream(dir.parent_path() / "secret.txt") << "secret";
  service::ServiceConfig c;
  c.static_dir = dir.string();
  ApiWorld w(c);

  const ApiResult root = w.api().call("GET", "/");
  EXPECT_EQ(root.status, 200);
  EXPECT_EQ(root.body, "<html>shell</html>");
  const ApiResult js = w.api().call("GET", "/assets/app.js");
  EXPECT_EQ(js.content_type, "text/javascript");
  EXPECT_EQ(w.api().call("GET", "/projects/abc/lexicon").body, "<html>shell</html>");
  EXPECT_EQ(w.api().call("GET", "/assets/missing.js").status, 404);
  EXPECT_EQ(w.api().call("GET", "/../secret.txt").status, 404);
  EXPECT_EQ(w.api().call("GET", "/assets/../../secret.txt").status, 404);
  EXPECT_EQ(w.api().call("POST", "/").status, 405);
  const ApiResult head = w.api().call("HEAD", "/");
  EXPECT_EQ(head.status, 200);
  EXPECT_TRUE(head.body.empty());
  std::filesystem::remove_all(dir);
  std::filesystem::remove(dir.parent_path() / "secret.txt");

  ApiWorld none;
  EXPECT_EQ(none.api().call("GET", "/").status, 404);
}
