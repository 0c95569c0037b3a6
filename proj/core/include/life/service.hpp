#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "life/auth.hpp"
#include "life/glosser.hpp"
#include "life/store.hpp"

namespace life::service {

struct UploadedFile {
  std::string field;
  std::string filename;
  std::string content_type;
  std::string content;
};

// Transport-neutral HTTP request. Header names are lowercase.
struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;
  std::string body;
  std::vector<UploadedFile> files;

  std::optional<std::string> header(std::string_view name) const;
  std::optional<std::string> param(std::string_view name) const;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

// Settings file: one "key = value" per line, "#" starts a comment.
//   addr            host:port to listen on (127.0.0.1:8080)
//   data_dir        file store directory; empty keeps everything in memory
//   base_iri        absolute IRI ending in "/" used for minted RDF nodes
//   secret          key for session-token hashing
//   static_dir      directory served for non-API paths
//   max_upload_mb   media upload cap (64)
//   kdf             password hashing cost: interactive | moderate | min
//   session_ttl_hours
//   compact_every   file store log records between compactions
//   threads         HTTP worker threads
// LIFE_ADDR, LIFE_DATA_DIR, LIFE_BASE_IRI and LIFE_SECRET override the file.
struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir;
  std::string base_iri = "http://localhost:8080/";
  std::string secret;
  std::string static_dir;
  std::size_t max_upload_bytes = 64u * 1024u * 1024u;
  std::string kdf = "interactive";
  std::int64_t session_ttl_seconds = 24 * 60 * 60;
  std::size_t compact_every = 1000;
  std::size_t threads = 8;
};

// Throws Error(InvalidArgument) naming the offending line.
ServiceConfig parse_config(std::string_view text);
ServiceConfig load_config(const std::filesystem::path& file);
void apply_env_overrides(ServiceConfig& config);

std::unique_ptr<store::DocumentStore> open_store(const ServiceConfig& config);

// Export formats accepted by GET /projects/{id}/export.
const std::vector<std::string>& export_formats();

struct ExportedFile {
  std::string body;
  std::string media_type;
  std::string filename;
  std::size_t mapping_warnings = 0;
};

// Serializes a stored project. Throws Error(UnsupportedFormat).
ExportedFile export_project(const store::DocumentStore& store, const Project& project, std::string_view format,
                            const std::string& base_iri);

struct ImportOptions {
  std::string title = "Imported text";  // igt only
  std::string translation_lang = "en";  // igt only
};

// Parses body as sfm, csv, igt or json and stores every valid entry and
// text in the project. JSON manifests get fresh ids throughout. Returns
// {entries, texts, text_ids, assets, skipped, warnings}.
codec::Json import_into_project(store::DocumentStore& store, const Project& project, std::string_view format,
                                std::string_view body, const ImportOptions& options = {});

std::vector<LexicalEntry> project_entries(const store::DocumentStore& store, const std::string& project_id);
std::vector<IGTDocument> project_texts(const store::DocumentStore& store, const std::string& project_id);
std::vector<Utterance> project_utterances(const store::DocumentStore& store, const std::string& project_id);

// Errors across every utterance of a text, plus duplicate utterance ids.
ValidationReport validate_text(const IGTDocument& text);

// The /api/v1 application. Thread-safe: handle() may run concurrently.
class Service {
 public:
  Service(std::shared_ptr<store::DocumentStore> store, ServiceConfig config,
          std::function<std::int64_t()> clock = {});

  Response handle(const Request& request);

  auth::Authenticator& auth() noexcept { return auth_; }
  store::DocumentStore& store() noexcept { return *store_; }
  const ServiceConfig& config() const noexcept { return config_; }

  // Active model snapshot for a project (an empty model if never trained).
  std::shared_ptr<const gloss::GlossModel> model(const std::string& project_id);

  // Rebuilds the model from every glossed utterance and the lexicon and
  // swaps it in; returns the new version.
  std::int64_t retrain(const std::string& project_id);

 private:
  struct Snapshot {
    std::shared_ptr<const gloss::GlossModel> model;
    std::shared_ptr<const gloss::ExternalPredictions> predictions;
  };
  friend class Router;

  Snapshot snapshot(const std::string& project_id);
  void install(const std::string& project_id, Snapshot snap);

  std::shared_ptr<store::DocumentStore> store_;
  ServiceConfig config_;
  auth::Authenticator auth_;
  std::mutex models_mutex_;
  std::mutex retrain_mutex_;
  std::map<std::string, Snapshot> models_;
};

// Runs an HTTP/1.1 server until stop_server() or process exit.
void serve(Service& service);
void stop_server();

}  // namespace life::service
