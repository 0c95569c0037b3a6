#pragma once

// In-process driver for Service::handle.

#include <map>
#include <string>

#include "life/codec.hpp"
#include "life/service.hpp"

namespace testsupport {

struct ApiResult {
  int status = 0;
  std::string body;
  std::string content_type;
  std::map<std::string, std::string> headers;

  life::codec::Json json() const {
    return body.empty() ? life::codec::Json() : life::codec::Json::parse(body);
  }
  std::string error_code() const {
    const auto j = json();
    return j.is_object() && j.contains("error") ? j["error"].value("code", "") : "";
  }
};

class ApiClient {
 public:
  explicit ApiClient(life::service::Service& service) : service_(service) {}

  ApiResult call(const std::string& method, const std::string& path, const std::string& token = {},
                 const std::string& body = {}, std::map<std::string, std::string> query = {},
                 std::map<std::string, std::string> headers = {}) {
    life::service::Request req;
    req.method = method;
    const auto q = path.find('?');
    req.path = path.substr(0, q);
    if (q != std::string::npos) {
      std::string rest = path.substr(q + 1);
      std::size_t pos = 0;
      while (pos <= rest.size()) {
        std::size_t amp = rest.find('&', pos);
        if (amp == std::string::npos) amp = rest.size();
        const std::string kv = rest.substr(pos, amp - pos);
        const auto eq = kv.find('=');
        if (!kv.empty()) query[kv.substr(0, eq)] = eq == std::string::npos ? "" : kv.substr(eq + 1);
        pos = amp + 1;
      }
    }
    req.query = std::move(query);
    req.headers = std::move(headers);
    if (!token.empty()) req.headers["authorization"] = "Bearer " + token;
    req.body = body;
    return send(req);
  }

  ApiResult send(const life::service::Request& req) {
    const life::service::Response r = service_.handle(req);
    return {r.status, r.body, r.content_type, r.headers};
  }

  ApiResult json(const std::string& method, const std::string& path, const std::string& token,
                 const life::codec::Json& body, std::map<std::string, std::string> headers = {}) {
    return call(method, path, token, body.dump(), {}, std::move(headers));
  }

  std::string login(const std::string& user, const std::string& password) {
    const auto r = json("POST", "/api/v1/auth/login", "", {{"username", user}, {"password", password}});
    return r.status == 200 ? r.json()["token"].get<std::string>() : std::string();
  }

 private:
  life::service::Service& service_;
};

}  // namespace testsupport
