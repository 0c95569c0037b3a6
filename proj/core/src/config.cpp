#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "life/error.hpp"
#include "life/service.hpp"
#include "life/text.hpp"

namespace life::service {

namespace {

template <typename T>
T parse_number(std::string_view value, std::size_t line) {
  T n{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
  if (ec != std::errc{} || p != value.data() + value.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "config line " + std::to_string(line) + ": '" + std::string(value) + "' is not a number");
  }
  return n;
}

void set_addr(ServiceConfig& c, std::string_view value, std::size_t line) {
  const auto colon = value.rfind(':');
  if (colon == std::string_view::npos) {
    c.host = std::string(value);
    return;
  }
  c.host = std::string(value.substr(0, colon));
  c.port = parse_number<int>(value.substr(colon + 1), line);
}

void set(ServiceConfig& c, std::string_view key, std::string_view value, std::size_t line) {
  if (key == "addr") {
    set_addr(c, value, line);
  } else if (key == "data_dir") {
    c.data_dir = std::string(value);
  } else if (key == "base_iri") {
    c.base_iri = std::string(value);
  } else if (key == "secret") {
    c.secret = std::string(value);
  } else if (key == "static_dir") {
    c.static_dir = std::string(value);
  } else if (key == "max_upload_mb") {
    c.max_upload_bytes = parse_number<std::size_t>(value, line) * 1024u * 1024u;
  } else if (key == "kdf") {
    c.kdf = std::string(value);
  } else if (key == "session_ttl_hours") {
    c.session_ttl_seconds = parse_number<std::int64_t>(value, line) * 3600;
  } else if (key == "compact_every") {
    c.compact_every = parse_number<std::size_t>(value, line);
  } else if (key == "threads") {
    c.threads = parse_number<std::size_t>(value, line);
  } else {
    throw Error(ErrorCode::InvalidArgument,
                "config line " + std::to_string(line) + ": unknown key '" + std::string(key) + "'");
  }
}

}  // namespace

ServiceConfig parse_config(std::string_view input) {
  ServiceConfig c;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos < input.size()) {
    std::size_t end = input.find('\n', pos);
    if (end == std::string_view::npos) end = input.size();
    std::string_view line = input.substr(pos, end - pos);
    pos = end + 1;
    ++number;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(number) + ": expected key = value");
    }
    set(c, text::trim(line.substr(0, eq)), text::trim(line.substr(eq + 1)), number);
  }
  return c;
}

ServiceConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read config file " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_env_overrides(ServiceConfig& config) {
  if (const char* v = std::getenv("LIFE_ADDR")) set_addr(config, v, 0);
  if (const char* v = std::getenv("LIFE_DATA_DIR")) config.data_dir = v;
  if (const char* v = std::getenv("LIFE_BASE_IRI")) config.base_iri = v;
  if (const char* v = std::getenv("LIFE_SECRET")) config.secret = v;
}

std::unique_ptr<store::DocumentStore> open_store(const ServiceConfig& config) {
  if (config.data_dir.empty()) return store::open_memory_store();
  return store::open_file_store(config.data_dir, store::FileStoreOptions{config.compact_every});
}

}  // namespace life::service
