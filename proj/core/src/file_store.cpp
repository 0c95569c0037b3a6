#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "life/error.hpp"
#include "life/store.hpp"

namespace life::store {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_error(const std::string& what) {
  throw Error(ErrorCode::Io, what + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view data, const std::string& what) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      io_error(what);
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

void sync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

// Writes `data` to `target` atomically via a temporary file and rename.
void write_file_atomic(const fs::path& target, std::string_view data) {
  const fs::path tmp = target.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_error("open " + tmp.string());
  try {
    write_all(fd, data, "write " + tmp.string());
    if (::fsync(fd) != 0) io_error("fsync " + tmp.string());
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  if (::rename(tmp.c_str(), target.c_str()) != 0) io_error("rename " + tmp.string());
  sync_dir(target.parent_path());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

FileStore::FileStore(fs::path dir, FileStoreOptions options)
    : dir_(std::move(dir)), options_(options) {
  std::error_code ec;
  fs::create_directories(dir_ / "blobs", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create data directory " + dir_.string() + ": " + ec.message());
  load();
  open_log(false);
}

FileStore::~FileStore() {
  if (log_fd_ >= 0) ::close(log_fd_);
}

void FileStore::open_log(bool truncate) {
  if (log_fd_ >= 0) ::close(log_fd_);
  const fs::path log = dir_ / "log";
  int flags = O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC;
  if (truncate) flags |= O_TRUNC;
  log_fd_ = ::open(log.c_str(), flags, 0644);
  if (log_fd_ < 0) io_error("open " + log.string());
}

void FileStore::load() {
  replaying_ = true;
  if (fs::exists(dir_ / "snapshot")) replay(dir_ / "snapshot", false);
  if (fs::exists(dir_ / "log")) replay(dir_ / "log", true);
  replaying_ = false;
}

void FileStore::replay(const fs::path& file, bool tolerate_torn_tail) {
  const std::string content = read_file(file);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    const bool last = end == std::string::npos;
    if (last) end = content.size();
    const std::string_view line(content.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      const Json j = Json::parse(line);
      Record r;
      r.op = j.at("op").get<std::string>() == "del" ? Record::Op::Remove : Record::Op::Put;
      r.collection = j.at("c").get<std::string>();
      r.id = j.at("id").get<std::string>();
      if (r.op == Record::Op::Put) {
        r.rev = j.at("rev").get<std::string>();
        r.bytes = j.at("bytes").get<std::string>();
      }
      apply(r);
      if (tolerate_torn_tail) ++log_records_;
    } catch (const Json::exception&) {
      // A crash mid-append can leave one partial record at the end of the log.
      if (tolerate_torn_tail && last) {
        // Drop the fragment so later appends start on a fresh line.
        fs::resize_file(file, content.size() - line.size());
        break;
      }
      throw Error(ErrorCode::Io, file.string() + ": corrupt record at line " + std::to_string(line_no));
    }
    if (tolerate_torn_tail && last) {
      std::ofstream(file, std::ios::app | std::ios::binary) << '\n';
    }
  }
}

void FileStore::persist(const Record& record) {
  if (replaying_) return;
  Json j{{"op", record.op == Record::Op::Put ? "put" : "del"}, {"c", record.collection}, {"id", record.id}};
  if (record.op == Record::Op::Put) {
    j["rev"] = record.rev;
    j["bytes"] = record.bytes;
  }
  const std::string line = codec::canonical(j) + "\n";
  write_all(log_fd_, line, "append to log");
  if (::fdatasync(log_fd_) != 0) io_error("fdatasync log");
  ++log_records_;
}

void FileStore::committed() {
  if (options_.compact_every > 0 && log_records_ >= options_.compact_every) compact();
}

void FileStore::compact() {
  auto lock = write_lock();
  compact_locked();
}

void FileStore::compact_locked() {
  std::string snapshot;
  for_each_document_unlocked([&](const std::string& collection, const std::string& id,
                                 const std::string& rev, const std::string& bytes) {
    snapshot += codec::canonical(Json{{"op", "put"}, {"c", collection}, {"id", id}, {"rev", rev}, {"bytes", bytes}});
    snapshot += '\n';
  });
  write_file_atomic(dir_ / "snapshot", snapshot);
  // Replaying the old log over the new snapshot is idempotent, so a crash
  // between the rename and this truncation loses nothing.
  open_log(true);
  ::fsync(log_fd_);
  log_records_ = 0;
}

fs::path FileStore::blob_path(std::string_view sha256) const {
  return dir_ / "blobs" / std::string(sha256.substr(0, 2)) / std::string(sha256);
}

std::string FileStore::put_blob(std::string_view bytes) {
  if (bytes.empty()) throw Error(ErrorCode::InvalidArgument, "blob is empty");
  std::string hash = sha256_hex(bytes);
  std::lock_guard lock(blob_mutex_);
  const fs::path path = blob_path(hash);
  if (!fs::exists(path)) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + path.parent_path().string());
    write_file_atomic(path, bytes);
  }
  return hash;
}

std::string FileStore::get_blob(std::string_view sha256) const {
  if (sha256.size() != 64) throw Error(ErrorCode::NotFound, "no blob " + std::string(sha256));
  std::lock_guard lock(blob_mutex_);
  const fs::path path = blob_path(sha256);
  if (!fs::exists(path)) throw Error(ErrorCode::NotFound, "no blob " + std::string(sha256));
  std::string data = read_file(path);
  if (sha256_hex(data) != sha256) throw Error(ErrorCode::Io, "blob " + std::string(sha256) + " is corrupt");
  return data;
}

bool FileStore::has_blob(std::string_view sha256) const {
  if (sha256.size() != 64) return false;
  std::lock_guard lock(blob_mutex_);
  return fs::exists(blob_path(sha256));
}

}  // namespace life::store
