#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "life/codec.hpp"

namespace life::store {

using codec::Json;

// Collections the store accepts; anything else is UnknownCollection.
inline constexpr std::array<std::string_view, 7> kCollections = {
    "users", "projects", "entries", "texts", "assets", "models", "sessions"};

bool is_collection(std::string_view name) noexcept;

std::string sha256_hex(std::string_view bytes);

struct Document {
  std::string id;
  std::string bytes;  // canonical JSON
  std::string rev;

  Json json() const { return codec::parse(bytes); }
};

struct Page {
  std::size_t offset = 0;
  std::size_t limit = 50;  // 1..500
};

inline constexpr std::size_t kMaxPageLimit = 500;

struct QueryFilter {
  std::optional<std::string> project_id;
  // (path, value); path segments separated by '/', e.g. "translation/lang".
  std::vector<std::pair<std::string, Json>> field_equals;
  std::optional<std::string> headword_prefix;
  // Collation used to order results when headword_prefix is set.
  std::vector<std::string> alphabet;
  Page page;
};

struct QueryResult {
  std::vector<Document> documents;
  std::size_t total = 0;
};

// Revisioned JSON document collections plus a content-addressed blob store.
// Readers may run concurrently; writers are serialized.
class DocumentStore {
 public:
  virtual ~DocumentStore() = default;

  // Inserts or replaces doc (which must carry a string "id"). Replacing an
  // existing document requires expected_rev to equal its current revision.
  virtual std::string put(std::string_view collection, const Json& doc,
                          const std::optional<std::string>& expected_rev = std::nullopt) = 0;
  virtual Document get(std::string_view collection, std::string_view id) const = 0;
  virtual QueryResult query(std::string_view collection, const QueryFilter& filter) const = 0;
  // Every match of filter in result order; filter.page is ignored.
  virtual std::vector<Document> scan(std::string_view collection, const QueryFilter& filter) const = 0;
  virtual void remove(std::string_view collection, std::string_view id,
                      std::string_view expected_rev) = 0;

  virtual std::string put_blob(std::string_view bytes) = 0;
  virtual std::string get_blob(std::string_view sha256) const = 0;
  virtual bool has_blob(std::string_view sha256) const = 0;
};

// In-memory backend. Also the state engine for FileStore.
class MemoryStore : public DocumentStore {
 public:
  MemoryStore() = default;

  std::string put(std::string_view collection, const Json& doc,
                  const std::optional<std::string>& expected_rev = std::nullopt) override;
  Document get(std::string_view collection, std::string_view id) const override;
  QueryResult query(std::string_view collection, const QueryFilter& filter) const override;
  std::vector<Document> scan(std::string_view collection, const QueryFilter& filter) const override;
  void remove(std::string_view collection, std::string_view id,
              std::string_view expected_rev) override;

  std::string put_blob(std::string_view bytes) override;
  std::string get_blob(std::string_view sha256) const override;
  bool has_blob(std::string_view sha256) const override;

  std::size_t size(std::string_view collection) const;

 protected:
  struct Record {
    enum class Op { Put, Remove } op = Op::Put;
    std::string collection;
    std::string id;
    std::string rev;
    std::string bytes;
  };

  // Called with the write lock held, before the change becomes visible.
  virtual void persist(const Record&) {}

  // Applies a record without revision checks or persistence (replay).
  void apply(const Record& record);

  // Called after a write is applied and the lock released.
  virtual void committed() {}

  std::unique_lock<std::shared_mutex> write_lock() const { return std::unique_lock(mutex_); }

  // Caller holds write_lock().
  template <typename F>
  void for_each_document_unlocked(F&& f) const {
    for (const auto& [name, coll] : collections_) {
      for (const auto& [id, stored] : coll.docs) f(name, id, stored.rev, stored.bytes);
    }
  }

  mutable std::mutex blob_mutex_;
  std::map<std::string, std::string, std::less<>> blobs_;

 private:
  struct Stored {
    std::string rev;
    std::string bytes;
    Json json;
  };
  struct Collection {
    std::map<std::string, Stored, std::less<>> docs;
    std::multimap<std::string, std::string, std::less<>> by_headword;
  };

  const Collection* find_collection(std::string_view name) const;
  Collection& collection_for_write(std::string_view name);
  std::vector<const std::pair<const std::string, Stored>*> match(const Collection& coll,
                                                                 const QueryFilter& filter) const;
  void index(Collection& coll, const std::string& id, const Json& json);
  void unindex(Collection& coll, const std::string& id, const Json& json);

  mutable std::shared_mutex mutex_;
  std::map<std::string, Collection, std::less<>> collections_;
};

struct FileStoreOptions {
  // Compact the write log into the snapshot after this many records.
  std::size_t compact_every = 1000;
};

// Single-node durable backend:
//   <dir>/log         append-only write-ahead log, one JSON record per line
//   <dir>/snapshot    compacted state, one JSON record per line
//   <dir>/blobs/<first-2-hex>/<sha256>
class FileStore : public MemoryStore {
 public:
  explicit FileStore(std::filesystem::path dir, FileStoreOptions options = {});
  ~FileStore() override;

  FileStore(const FileStore&) = delete;
  FileStore& operator=(const FileStore&) = delete;

  std::string put_blob(std::string_view bytes) override;
  std::string get_blob(std::string_view sha256) const override;
  bool has_blob(std::string_view sha256) const override;

  // Rewrites the snapshot from current state and truncates the log.
  void compact();

  const std::filesystem::path& dir() const noexcept { return dir_; }

 protected:
  void persist(const Record& record) override;
  void committed() override;

 private:
  void load();
  void replay(const std::filesystem::path& file, bool tolerate_torn_tail);
  void open_log(bool truncate);
  void compact_locked();
  std::filesystem::path blob_path(std::string_view sha256) const;

  std::filesystem::path dir_;
  FileStoreOptions options_;
  int log_fd_ = -1;
  std::size_t log_records_ = 0;
  bool replaying_ = false;
};

std::unique_ptr<DocumentStore> open_memory_store();
std::unique_ptr<DocumentStore> open_file_store(const std::filesystem::path& dir,
                                               FileStoreOptions options = {});

}  // namespace life::store
