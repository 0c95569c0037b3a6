#include "life/auth.hpp"

#include <sodium.h>

#include <chrono>

#include "life/codec.hpp"
#include "life/error.hpp"
#include "life/text.hpp"
#include "sodium_init.hpp"

namespace life::auth {

namespace {

std::int64_t system_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string random_key() {
  std::string key(crypto_generichash_KEYBYTES, '\0');
  randombytes_buf(key.data(), key.size());
  return key;
}

std::string derive_key(std::string_view secret) {
  std::string key(crypto_generichash_KEYBYTES, '\0');
  crypto_generichash(reinterpret_cast<unsigned char*>(key.data()), key.size(),
                     reinterpret_cast<const unsigned char*>(secret.data()), secret.size(), nullptr, 0);
  return key;
}

Error unauthenticated() { return Error(ErrorCode::Unauthenticated, "missing, invalid or expired token"); }

}  // namespace

std::string_view to_string(Action action) noexcept {
  switch (action) {
    case Action::Read: return "read";
    case Action::Write: return "write";
    case Action::Admin: return "admin";
  }
  return "read";
}

bool role_allows(Role role, Action action) noexcept {
  switch (role) {
    case Role::Owner: return true;
    case Role::Editor: return action != Action::Admin;
    case Role::Viewer: return action == Action::Read;
  }
  return false;
}

KdfProfile KdfProfile::interactive() {
  return {crypto_pwhash_OPSLIMIT_INTERACTIVE, crypto_pwhash_MEMLIMIT_INTERACTIVE};
}

KdfProfile KdfProfile::moderate() { return {crypto_pwhash_OPSLIMIT_MODERATE, crypto_pwhash_MEMLIMIT_MODERATE}; }

KdfProfile KdfProfile::minimal() { return {crypto_pwhash_OPSLIMIT_MIN, crypto_pwhash_MEMLIMIT_MIN}; }

KdfProfile KdfProfile::named(std::string_view name) {
  if (name == "interactive") return interactive();
  if (name == "moderate") return moderate();
  if (name == "min") return minimal();
  throw Error(ErrorCode::InvalidArgument, "unknown kdf profile '" + std::string(name) + "'");
}

std::string hash_password(std::string_view password, const KdfProfile& profile) {
  detail::ensure_sodium();
  char out[crypto_pwhash_STRBYTES];
  if (crypto_pwhash_str(out, password.data(), password.size(), profile.opslimit, profile.memlimit) != 0) {
    throw Error(ErrorCode::Io, "password hashing ran out of memory");
  }
  return out;
}

bool verify_password(std::string_view hash, std::string_view password) noexcept {
  detail::ensure_sodium();
  const std::string h(hash);
  return crypto_pwhash_str_verify(h.c_str(), password.data(), password.size()) == 0;
}

Authenticator::Authenticator(std::shared_ptr<store::DocumentStore> store, AuthOptions options)
    : store_(std::move(store)), options_(std::move(options)) {
  detail::ensure_sodium();
  if (!options_.clock) options_.clock = system_seconds;
  session_key_ = options_.secret.empty() ? random_key() : derive_key(options_.secret);
  dummy_hash_ = hash_password(random_key(), options_.kdf);
}

std::int64_t Authenticator::now() const { return options_.clock(); }

std::string Authenticator::session_id(std::string_view token) const {
  unsigned char out[crypto_generichash_BYTES];
  crypto_generichash(out, sizeof out, reinterpret_cast<const unsigned char*>(token.data()), token.size(),
                     reinterpret_cast<const unsigned char*>(session_key_.data()), session_key_.size());
  return text::to_hex(out, sizeof out);
}

User Authenticator::create_user(std::string_view username, std::string_view password,
                                std::optional<std::string> email) {
  if (!is_valid_username(username)) {
    throw Error(ErrorCode::InvalidName, "invalid username '" + std::string(username) + "'");
  }
  if (password.empty()) throw Error(ErrorCode::InvalidArgument, "password must not be empty");
  User u;
  u.id = new_id();
  u.username = std::string(username);
  u.password_hash = hash_password(password, options_.kdf);
  u.email = std::move(email);
  std::lock_guard lock(users_mutex_);
  if (find_user(username)) {
    throw Error(ErrorCode::Conflict, "username '" + std::string(username) + "' is taken");
  }
  store_->put("users", codec::to_json(u));
  return u;
}

std::optional<User> Authenticator::find_user(std::string_view username) const {
  store::QueryFilter filter;
  filter.field_equals.emplace_back("username", std::string(username));
  const auto docs = store_->scan("users", filter);
  if (docs.empty()) return std::nullopt;
  return codec::user_from_json(docs.front().json());
}

User Authenticator::get_user(std::string_view user_id) const {
  return codec::user_from_json(store_->get("users", user_id).json());
}

Session Authenticator::authenticate(std::string_view username, std::string_view password) {
  const auto user = find_user(username);
  // Unknown users still pay for one verification so timing does not reveal
  // which usernames exist.
  const bool ok = verify_password(user ? user->password_hash : dummy_hash_, password);
  if (!user || !ok) throw Error(ErrorCode::InvalidCredentials, "invalid username or password");

  unsigned char raw[32];
  randombytes_buf(raw, sizeof raw);
  char encoded[sodium_base64_ENCODED_LEN(32, sodium_base64_VARIANT_URLSAFE_NO_PADDING)];
  sodium_bin2base64(encoded, sizeof encoded, raw, sizeof raw, sodium_base64_VARIANT_URLSAFE_NO_PADDING);

  Session s{encoded, user->id, now() + options_.session_ttl_seconds};
  store_->put("sessions", codec::Json{{"id", session_id(s.token)},
                                      {"user_id", s.user_id},
                                      {"expires_at", s.expires_at},
                                      {"created_at", now_rfc3339()}});
  return s;
}

std::string Authenticator::resolve(std::string_view token) const {
  if (token.empty()) throw unauthenticated();
  store::Document doc;
  try {
    doc = store_->get("sessions", session_id(token));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotFound) throw unauthenticated();
    throw;
  }
  const codec::Json j = doc.json();
  if (j.value("expires_at", std::int64_t{0}) <= now()) throw unauthenticated();
  return j.value("user_id", "");
}

void Authenticator::revoke(std::string_view token) {
  const std::string id = session_id(token);
  try {
    const store::Document doc = store_->get("sessions", id);
    store_->remove("sessions", id, doc.rev);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotFound) throw;
  }
}

std::string Authenticator::authorize(std::string_view token, std::string_view project_id, Action action) const {
  const std::string user_id = resolve(token);
  const Project project = codec::project_from_json(store_->get("projects", project_id).json());
  auto it = project.members.find(user_id);
  if (it == project.members.end()) {
    throw Error(ErrorCode::Forbidden, "not a member of project " + project.slug);
  }
  if (!role_allows(it->second, action)) {
    throw Error(ErrorCode::Forbidden, std::string(to_string(it->second)) + " role does not grant " +
                                          std::string(to_string(action)));
  }
  return user_id;
}

}  // namespace life::auth
