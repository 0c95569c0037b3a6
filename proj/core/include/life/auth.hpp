#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "life/model.hpp"
#include "life/store.hpp"

namespace life::auth {

enum class Action { Read, Write, Admin };

std::string_view to_string(Action action) noexcept;

// viewer: read; editor: read, write; owner: read, write, admin.
bool role_allows(Role role, Action action) noexcept;

// Argon2id cost. "interactive" is the deployment default; "min" exists so
// test suites can create many users quickly.
struct KdfProfile {
  std::uint64_t opslimit = 0;
  std::size_t memlimit = 0;

  static KdfProfile interactive();
  static KdfProfile moderate();
  static KdfProfile minimal();
  // "interactive", "moderate" or "min"; throws Error(InvalidArgument).
  static KdfProfile named(std::string_view name);
};

std::string hash_password(std::string_view password, const KdfProfile& profile);
bool verify_password(std::string_view hash, std::string_view password) noexcept;

struct Session {
  std::string token;  // 256 random bits, URL-safe base64 without padding
  std::string user_id;
  std::int64_t expires_at = 0;  // unix seconds
};

struct AuthOptions {
  KdfProfile kdf = KdfProfile::interactive();
  std::int64_t session_ttl_seconds = 24 * 60 * 60;
  // Keys the session-token hash. Empty means a random per-process key, so
  // sessions do not survive a restart.
  std::string secret;
  // Seconds since the epoch; replaceable for expiry tests.
  std::function<std::int64_t()> clock;
};

// Users and sessions live in the document store. Session documents are
// keyed by a keyed hash of the token, never the token itself.
class Authenticator {
 public:
  Authenticator(std::shared_ptr<store::DocumentStore> store, AuthOptions options = {});

  // Throws Error(InvalidName) for a bad username, Error(Conflict) when it is
  // taken, Error(InvalidArgument) for an empty password.
  User create_user(std::string_view username, std::string_view password,
                   std::optional<std::string> email = std::nullopt);
  std::optional<User> find_user(std::string_view username) const;
  User get_user(std::string_view user_id) const;

  // Throws Error(InvalidCredentials) for an unknown user and a wrong
  // password alike; both paths run one password verification.
  Session authenticate(std::string_view username, std::string_view password);

  // Throws Error(Unauthenticated) for unknown, revoked or expired tokens.
  std::string resolve(std::string_view token) const;
  void revoke(std::string_view token);

  // Resolves the token then checks the caller's role in the project.
  // Throws Unauthenticated, NotFound (no such project) or Forbidden.
  std::string authorize(std::string_view token, std::string_view project_id, Action action) const;

  std::int64_t now() const;

 private:
  std::string session_id(std::string_view token) const;

  std::shared_ptr<store::DocumentStore> store_;
  AuthOptions options_;
  std::string session_key_;
  std::string dummy_hash_;
  std::mutex users_mutex_;
};

}  // namespace life::auth
