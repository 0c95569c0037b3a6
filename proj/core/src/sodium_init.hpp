#pragma once

namespace life::detail {

// Idempotent, thread-safe libsodium initialisation.
void ensure_sodium();

}  // namespace life::detail
