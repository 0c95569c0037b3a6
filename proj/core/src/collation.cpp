#include "life/collation.hpp"

#include <algorithm>

#include "life/text.hpp"

namespace life::dict {

std::strong_ordering CollationKey::operator<=>(const CollationKey& other) const {
  if (auto c = ranks <=> other.ranks; c != 0) return c;
  // UTF-8 byte order equals code point order.
  const int r = raw.compare(other.raw);
  return r < 0 ? std::strong_ordering::less
               : (r > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

Collator::Collator(std::vector<std::string> alphabet) : alphabet_(std::move(alphabet)) {
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    std::u32string unit = text::decode(text::lower(alphabet_[i]));
    if (unit.empty()) continue;
    auto& bucket = by_first_[unit.front()];
    const bool duplicate = std::any_of(bucket.begin(), bucket.end(),
                                       [&](const auto& u) { return u.first == unit; });
    if (!duplicate) bucket.emplace_back(std::move(unit), static_cast<std::int64_t>(i));
  }
  for (auto& [cp, bucket] : by_first_) {
    std::stable_sort(bucket.begin(), bucket.end(), [](const auto& a, const auto& b) {
      return a.first.size() > b.first.size();
    });
  }
}

std::vector<CollationToken> Collator::tokenize(std::string_view s) const {
  const std::u32string cps = text::decode(text::lower(s));
  const auto unknown_base = static_cast<std::int64_t>(alphabet_.size());
  std::vector<CollationToken> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    CollationToken tok{unknown_base + static_cast<std::int64_t>(cps[i]), 1};
    if (auto it = by_first_.find(cps[i]); it != by_first_.end()) {
      for (const auto& [unit, rank] : it->second) {
        if (cps.compare(i, unit.size(), unit) == 0) {
          tok = {rank, unit.size()};
          break;
        }
      }
    }
    out.push_back(tok);
    i += tok.length;
  }
  return out;
}

CollationKey Collator::key(std::string_view s) const {
  CollationKey k;
  for (const auto& tok : tokenize(s)) k.ranks.push_back(tok.rank);
  k.raw = std::string(s);
  return k;
}

std::strong_ordering Collator::compare(std::string_view a, std::string_view b) const {
  if (a == b) return std::strong_ordering::equal;
  return key(a) <=> key(b);
}

std::string Collator::initial(std::string_view s) const {
  const auto toks = tokenize(s);
  if (toks.empty() || toks.front().rank >= static_cast<std::int64_t>(alphabet_.size())) return "#";
  return alphabet_[static_cast<std::size_t>(toks.front().rank)];
}

CollationKey collation_key(const std::vector<std::string>& alphabet, std::string_view s) {
  return Collator(alphabet).key(s);
}

std::strong_ordering compare_headwords(const std::vector<std::string>& alphabet,
                                       std::string_view a, std::string_view b) {
  return Collator(alphabet).compare(a, b);
}

}  // namespace life::dict
