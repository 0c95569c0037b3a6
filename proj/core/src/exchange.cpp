#include "life/codec.hpp"
#include "life/error.hpp"
#include "life/ingest.hpp"

namespace life::ingest {

using codec::Json;

std::string export_json(const ProjectData& data) {
  Json entries = Json::array();
  for (const auto& e : data.entries) entries.push_back(codec::to_json(e));
  Json texts = Json::array();
  for (const auto& t : data.texts) texts.push_back(codec::to_json(t));
  Json assets = Json::array();
  for (const auto& a : data.assets) assets.push_back(codec::to_json(a));
  const Json manifest{{"format_version", kFormatVersion},
                      {"revision_policy", "regenerate"},
                      {"project", codec::to_json(data.project)},
                      {"entries", entries},
                      {"texts", texts},
                      {"assets", assets}};
  return codec::canonical(manifest);
}

namespace {

ProjectData decode_manifest(const Json& j) {
  if (!j.is_object()) throw SchemaError("", "manifest must be a JSON object");

  auto version = j.find("format_version");
  if (version == j.end()) throw SchemaError("/format_version", "required field is missing");
  if (!version->is_number_integer() || version->get<int>() != kFormatVersion) {
    throw SchemaError("/format_version", "unsupported format version");
  }
  if (auto policy = j.find("revision_policy"); policy != j.end() && *policy != "regenerate") {
    throw SchemaError("/revision_policy", "unsupported revision policy");
  }

  ProjectData data;
  auto project = j.find("project");
  if (project == j.end()) throw SchemaError("/project", "required field is missing");
  data.project = codec::project_from_json(*project, "/project");

  auto list = [&j](const char* key) -> const Json& {
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(std::string("/") + key, "required field is missing");
    if (!it->is_array()) throw SchemaError(std::string("/") + key, "expected an array");
    return *it;
  };
  const Json& entries = list("entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    data.entries.push_back(codec::entry_from_json(entries[i], "/entries/" + std::to_string(i)));
  }
  const Json& texts = list("texts");
  for (std::size_t i = 0; i < texts.size(); ++i) {
    data.texts.push_back(codec::text_from_json(texts[i], "/texts/" + std::to_string(i)));
  }
  const Json& assets = list("assets");
  for (std::size_t i = 0; i < assets.size(); ++i) {
    data.assets.push_back(codec::asset_from_json(assets[i], "/assets/" + std::to_string(i)));
  }
  // Revisions are regenerated by whoever stores the data.
  data.project.rev.clear();
  for (auto& e : data.entries) e.rev.clear();
  for (auto& t : data.texts) t.rev.clear();
  return data;
}

}  // namespace

ProjectData import_json(std::string_view bytes) {
  const Json j = codec::parse(bytes);
  try {
    return decode_manifest(j);
  } catch (const Json::exception& e) {
    throw SchemaError("", std::string("malformed manifest: ") + e.what());
  }
}

}  // namespace life::ingest
