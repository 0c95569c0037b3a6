#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cctype>

#include "life/error.hpp"
#include "life/service.hpp"

namespace life::service {

namespace {

std::mutex g_server_mutex;
httplib::Server* g_server = nullptr;

// Headroom for multipart framing and form fields around the file itself.
constexpr std::size_t kUploadOverhead = 1024u * 1024u;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Request convert(const httplib::Request& in) {
  Request out;
  out.method = in.method;
  out.path = in.path;
  for (const auto& [k, v] : in.params) out.query.emplace(k, v);
  for (const auto& [k, v] : in.headers) out.headers.emplace(lower(k), v);
  if (in.is_multipart_form_data()) {
    for (const auto& [name, f] : in.files) out.files.push_back({name, f.filename, f.content_type, f.content});
  } else {
    out.body = in.body;
  }
  return out;
}

void dispatch(Service& service, const httplib::Request& in, httplib::Response& out) {
  const Response r = service.handle(convert(in));
  out.status = r.status;
  for (const auto& [k, v] : r.headers) out.set_header(k, v);
  if (r.status != 204) out.set_content(r.body, r.content_type);
}

}  // namespace

void serve(Service& service) {
  httplib::Server server;
  const ServiceConfig& config = service.config();
  server.new_task_queue = [n = std::max<std::size_t>(config.threads, 1)] { return new httplib::ThreadPool(n); };
  server.set_payload_max_length(config.max_upload_bytes + kUploadOverhead);

  auto handler = [&service](const httplib::Request& in, httplib::Response& out) { dispatch(service, in, out); };
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Put(".*", handler);
  server.Delete(".*", handler);
  server.Patch(".*", handler);
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.status == 413 && res.body.empty()) {
      res.set_content(R"({"error":{"code":"PayloadTooLarge","message":"request body too large"}})",
                      "application/json");
    }
  });

  {
    std::lock_guard lock(g_server_mutex);
    g_server = &server;
  }
  const bool ok = server.listen(config.host, config.port);
  {
    std::lock_guard lock(g_server_mutex);
    g_server = nullptr;
  }
  if (!ok) {
    throw Error(ErrorCode::Io, "cannot listen on " + config.host + ":" + std::to_string(config.port));
  }
}

void stop_server() {
  std::lock_guard lock(g_server_mutex);
  if (g_server) g_server->stop();
}

}  // namespace life::service
