#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace life::dict {

// Ranks of the alphabet units of a string, then the raw string as the final
// tie-break. Characters outside the alphabet rank as |alphabet| + code point.
struct CollationKey {
  std::vector<std::int64_t> ranks;
  std::string raw;

  std::strong_ordering operator<=>(const CollationKey& other) const;
  bool operator==(const CollationKey& other) const = default;
};

struct CollationToken {
  std::int64_t rank = 0;
  std::size_t length = 0;  // code points consumed from the lowercased input
};

// Greedy longest-match tokenizer over a project's ordered alphabet.
// Matching is done on lowercased text against lowercased units.
class Collator {
 public:
  Collator() = default;
  explicit Collator(std::vector<std::string> alphabet);

  const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return alphabet_.size(); }

  std::vector<CollationToken> tokenize(std::string_view s) const;
  CollationKey key(std::string_view s) const;
  std::strong_ordering compare(std::string_view a, std::string_view b) const;

  // Alphabet unit that starts `s`, or "#" when the first character is not
  // part of the alphabet.
  std::string initial(std::string_view s) const;

  bool operator()(std::string_view a, std::string_view b) const { return compare(a, b) < 0; }

 private:
  std::vector<std::string> alphabet_;
  // first code point -> (unit code points, rank), longest unit first
  std::unordered_map<char32_t, std::vector<std::pair<std::u32string, std::int64_t>>> by_first_;
};

CollationKey collation_key(const std::vector<std::string>& alphabet, std::string_view s);
std::strong_ordering compare_headwords(const std::vector<std::string>& alphabet,
                                       std::string_view a, std::string_view b);

}  // namespace life::dict
