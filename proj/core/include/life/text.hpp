#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by the parsers, the glosser and collation.
namespace life::text {

// Decodes UTF-8 into code points. Invalid sequences decode as U+FFFD, one
// per offending byte.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view cps);
std::string encode(char32_t cp);

// Byte offsets of every code point start, plus a trailing entry for size().
std::vector<std::size_t> boundaries(std::string_view utf8);

std::size_t length(std::string_view utf8);

// 1-based code-point column of a byte offset within a line.
std::size_t column_of(std::string_view line, std::size_t byte_offset);

// Unicode NFC. Text entering the system through a parser passes here.
std::string nfc(std::string_view utf8);

// Full Unicode lowercase mapping (root locale).
std::string lower(std::string_view utf8);

bool is_space(char c) noexcept;
std::string_view trim(std::string_view s) noexcept;

// Splits on runs of ASCII whitespace; no empty tokens.
std::vector<std::string_view> split_ws(std::string_view s);

// Collapses whitespace runs to single spaces and trims.
std::string normalize_ws(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix) noexcept;

std::string to_hex(const unsigned char* data, std::size_t n);

}  // namespace life::text
