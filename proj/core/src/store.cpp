#include "life/store.hpp"

#include <sodium.h>

#include <algorithm>
#include <charconv>

#include "life/collation.hpp"
#include "life/error.hpp"
#include "life/text.hpp"
#include "sodium_init.hpp"

namespace life::store {

namespace {

const Json* lookup(const Json& doc, std::string_view path) {
  const Json* cur = &doc;
  while (!path.empty()) {
    const auto slash = path.find('/');
    const std::string_view seg = path.substr(0, slash);
    path = slash == std::string_view::npos ? std::string_view{} : path.substr(slash + 1);
    if (cur->is_object()) {
      auto it = cur->find(std::string(seg));
      if (it == cur->end()) return nullptr;
      cur = &*it;
    } else if (cur->is_array()) {
      std::size_t idx = 0;
      auto [p, ec] = std::from_chars(seg.data(), seg.data() + seg.size(), idx);
      if (ec != std::errc{} || p != seg.data() + seg.size() || idx >= cur->size()) return nullptr;
      cur = &(*cur)[idx];
    } else {
      return nullptr;
    }
  }
  return cur;
}

std::uint64_t rev_counter(std::string_view rev) {
  std::uint64_t n = 0;
  std::from_chars(rev.data(), rev.data() + rev.size(), n);
  return n;
}

void check_page(const Page& page) {
  if (page.limit < 1 || page.limit > kMaxPageLimit) {
    throw Error(ErrorCode::InvalidArgument, "page limit must be within [1, 500]");
  }
}

std::string headword_of(const Json& j) {
  auto it = j.find("headword");
  return it != j.end() && it->is_string() ? it->get<std::string>() : std::string{};
}

}  // namespace

bool is_collection(std::string_view name) noexcept {
  return std::find(kCollections.begin(), kCollections.end(), name) != kCollections.end();
}

std::string sha256_hex(std::string_view bytes) {
  detail::ensure_sodium();
  unsigned char digest[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(digest, reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
  return text::to_hex(digest, sizeof digest);
}

const MemoryStore::Collection* MemoryStore::find_collection(std::string_view name) const {
  if (!is_collection(name)) {
    throw Error(ErrorCode::UnknownCollection, "unknown collection '" + std::string(name) + "'");
  }
  auto it = collections_.find(name);
  return it == collections_.end() ? nullptr : &it->second;
}

MemoryStore::Collection& MemoryStore::collection_for_write(std::string_view name) {
  if (!is_collection(name)) {
    throw Error(ErrorCode::UnknownCollection, "unknown collection '" + std::string(name) + "'");
  }
  auto it = collections_.find(name);
  if (it == collections_.end()) it = collections_.emplace(std::string(name), Collection{}).first;
  return it->second;
}

void MemoryStore::index(Collection& coll, const std::string& id, const Json& json) {
  if (json.contains("headword")) coll.by_headword.emplace(headword_of(json), id);
}

void MemoryStore::unindex(Collection& coll, const std::string& id, const Json& json) {
  if (!json.contains("headword")) return;
  auto [lo, hi] = coll.by_headword.equal_range(headword_of(json));
  for (auto it = lo; it != hi; ++it) {
    if (it->second == id) {
      coll.by_headword.erase(it);
      return;
    }
  }
}

void MemoryStore::apply(const Record& record) {
  Collection& coll = collection_for_write(record.collection);
  auto it = coll.docs.find(record.id);
  if (it != coll.docs.end()) {
    unindex(coll, record.id, it->second.json);
    if (record.op == Record::Op::Remove) {
      coll.docs.erase(it);
      return;
    }
  } else if (record.op == Record::Op::Remove) {
    return;
  }
  Stored stored{record.rev, record.bytes, codec::parse(record.bytes)};
  index(coll, record.id, stored.json);
  coll.docs.insert_or_assign(record.id, std::move(stored));
}

std::string MemoryStore::put(std::string_view collection, const Json& doc,
                             const std::optional<std::string>& expected_rev) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidArgument, "document must be a JSON object");
  auto id_it = doc.find("id");
  if (id_it == doc.end() || !id_it->is_string() || id_it->get<std::string>().empty()) {
    throw Error(ErrorCode::InvalidArgument, "document has no string id");
  }
  Record record;
  record.collection = std::string(collection);
  record.id = id_it->get<std::string>();
  record.bytes = codec::canonical(doc);
  {
    std::unique_lock lock(mutex_);
    Collection& coll = collection_for_write(collection);
    std::uint64_t counter = 0;
    if (auto it = coll.docs.find(record.id); it != coll.docs.end()) {
      if (!expected_rev || *expected_rev != it->second.rev) throw StaleRevisionError(it->second.rev);
      counter = rev_counter(it->second.rev);
    } else if (expected_rev) {
      throw Error(ErrorCode::NotFound, "document '" + record.id + "' does not exist");
    }
    record.rev = std::to_string(counter + 1) + "-" + sha256_hex(record.bytes).substr(0, 8);
    persist(record);
    apply(record);
  }
  committed();
  return record.rev;
}

Document MemoryStore::get(std::string_view collection, std::string_view id) const {
  std::shared_lock lock(mutex_);
  const Collection* coll = find_collection(collection);
  if (coll) {
    if (auto it = coll->docs.find(id); it != coll->docs.end()) {
      return Document{it->first, it->second.bytes, it->second.rev};
    }
  }
  throw Error(ErrorCode::NotFound,
              "no document '" + std::string(id) + "' in " + std::string(collection));
}

void MemoryStore::remove(std::string_view collection, std::string_view id,
                         std::string_view expected_rev) {
  {
    std::unique_lock lock(mutex_);
    Collection& coll = collection_for_write(collection);
    auto it = coll.docs.find(id);
    if (it == coll.docs.end()) {
      throw Error(ErrorCode::NotFound,
                  "no document '" + std::string(id) + "' in " + std::string(collection));
    }
    if (it->second.rev != expected_rev) throw StaleRevisionError(it->second.rev);
    Record record{Record::Op::Remove, std::string(collection), std::string(id), {}, {}};
    persist(record);
    apply(record);
  }
  committed();
}

std::vector<const std::pair<const std::string, MemoryStore::Stored>*> MemoryStore::match(
    const Collection& coll, const QueryFilter& filter) const {
  using Item = const std::pair<const std::string, Stored>*;
  auto accepts = [&](const Stored& s) {
    if (filter.project_id) {
      const Json* p = lookup(s.json, "project_id");
      if (!p || !p->is_string() || p->get<std::string>() != *filter.project_id) return false;
    }
    for (const auto& [path, value] : filter.field_equals) {
      const Json* v = lookup(s.json, path);
      if (!v || *v != value) return false;
    }
    return true;
  };

  std::vector<Item> out;
  if (filter.headword_prefix) {
    const std::string& prefix = *filter.headword_prefix;
    for (auto it = coll.by_headword.lower_bound(prefix);
         it != coll.by_headword.end() && text::starts_with(it->first, prefix); ++it) {
      auto doc = coll.docs.find(it->second);
      if (doc != coll.docs.end() && accepts(doc->second)) out.push_back(&*doc);
    }
    const dict::Collator collator(filter.alphabet);
    std::vector<std::pair<dict::CollationKey, Item>> keyed;
    keyed.reserve(out.size());
    for (Item item : out) keyed.emplace_back(collator.key(headword_of(item->second.json)), item);
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
      if (auto c = a.first <=> b.first; c != 0) return c < 0;
      return a.second->first < b.second->first;
    });
    for (std::size_t i = 0; i < keyed.size(); ++i) out[i] = keyed[i].second;
  } else {
    for (const auto& item : coll.docs) {
      if (accepts(item.second)) out.push_back(&item);
    }
  }
  return out;
}

QueryResult MemoryStore::query(std::string_view collection, const QueryFilter& filter) const {
  check_page(filter.page);
  std::shared_lock lock(mutex_);
  QueryResult result;
  const Collection* coll = find_collection(collection);
  if (!coll) return result;
  const auto matches = match(*coll, filter);
  result.total = matches.size();
  for (std::size_t i = filter.page.offset;
       i < matches.size() && result.documents.size() < filter.page.limit; ++i) {
    result.documents.push_back({matches[i]->first, matches[i]->second.bytes, matches[i]->second.rev});
  }
  return result;
}

std::vector<Document> MemoryStore::scan(std::string_view collection, const QueryFilter& filter) const {
  std::shared_lock lock(mutex_);
  std::vector<Document> out;
  const Collection* coll = find_collection(collection);
  if (!coll) return out;
  for (const auto* item : match(*coll, filter)) {
    out.push_back({item->first, item->second.bytes, item->second.rev});
  }
  return out;
}

std::size_t MemoryStore::size(std::string_view collection) const {
  std::shared_lock lock(mutex_);
  const Collection* coll = find_collection(collection);
  return coll ? coll->docs.size() : 0;
}

std::string MemoryStore::put_blob(std::string_view bytes) {
  if (bytes.empty()) throw Error(ErrorCode::InvalidArgument, "blob is empty");
  std::string hash = sha256_hex(bytes);
  std::lock_guard lock(blob_mutex_);
  blobs_.try_emplace(hash, bytes);
  return hash;
}

std::string MemoryStore::get_blob(std::string_view sha256) const {
  std::lock_guard lock(blob_mutex_);
  auto it = blobs_.find(sha256);
  if (it == blobs_.end()) throw Error(ErrorCode::NotFound, "no blob " + std::string(sha256));
  return it->second;
}

bool MemoryStore::has_blob(std::string_view sha256) const {
  std::lock_guard lock(blob_mutex_);
  return blobs_.count(sha256) > 0;
}

std::unique_ptr<DocumentStore> open_memory_store() { return std::make_unique<MemoryStore>(); }

std::unique_ptr<DocumentStore> open_file_store(const std::filesystem::path& dir,
                                               FileStoreOptions options) {
  return std::make_unique<FileStore>(dir, options);
}

}  // namespace life::store
