#include <algorithm>
#include <optional>

#include "life/error.hpp"
#include "life/ingest.hpp"
#include "life/text.hpp"

namespace life::ingest {

namespace {

struct Tier {
  std::string_view line;   // the full source line
  std::string_view value;  // text after the marker
  std::size_t value_offset = 0;
  std::size_t number = 0;
};

struct Block {
  std::optional<Tier> tx, mb, gl, ft;
};

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based within the source line
};

std::vector<Token> tokens_of(const Tier& tier) {
  std::vector<Token> out;
  for (std::string_view tok : text::split_ws(tier.value)) {
    const auto offset = static_cast<std::size_t>(tok.data() - tier.line.data());
    out.push_back({tok, text::column_of(tier.line, offset)});
  }
  return out;
}

// Column just past the end of a tier line, for "token missing" reports.
std::size_t end_column(const Tier& tier) { return text::length(tier.line) + 1; }

struct Pieces {
  std::vector<std::string_view> parts;
  std::vector<char> seps;  // seps[i] sits between parts[i] and parts[i+1]
};

Pieces split_morphs(std::string_view token) {
  Pieces p;
  std::size_t start = 0;
  for (std::size_t i = 0; i < token.size(); ++i) {
    if (token[i] == '-' || token[i] == '=') {
      p.parts.push_back(token.substr(start, i - start));
      p.seps.push_back(token[i]);
      start = i + 1;
    }
  }
  p.parts.push_back(token.substr(start));
  return p;
}

bool looks_lexical(std::string_view gloss) {
  // Leipzig convention: grammatical labels are upper case, lexical glosses
  // contain lower-case letters.
  return std::any_of(gloss.begin(), gloss.end(), [](char c) { return c >= 'a' && c <= 'z'; }) ||
         std::any_of(gloss.begin(), gloss.end(), [](char c) { return static_cast<unsigned char>(c) >= 0x80; });
}

// Types each morph of a word. The root is the first piece with a lexical
// gloss (or the first piece when none is lexical); "="-attached groups other
// than the root's are clitics; host-group pieces before the root are
// prefixes and after it suffixes.
std::vector<MorphType> assign_types(const Pieces& mb, const Pieces& gl) {
  const std::size_t n = mb.parts.size();
  std::size_t root = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (looks_lexical(gl.parts[i])) {
      root = i;
      break;
    }
  }
  std::vector<std::size_t> group(n, 0);
  for (std::size_t i = 1; i < n; ++i) group[i] = group[i - 1] + (mb.seps[i - 1] == '=' ? 1 : 0);

  std::vector<MorphType> types(n, MorphType::Root);
  for (std::size_t i = 0; i < n; ++i) {
    if (group[i] != group[root]) {
      types[i] = MorphType::Clitic;
    } else if (i < root) {
      types[i] = MorphType::Prefix;
    } else if (i > root) {
      types[i] = MorphType::Suffix;
    }
  }
  return types;
}

[[noreturn]] void misaligned(const Tier& tier, std::size_t column, const std::string& message) {
  throw ParseError(ErrorCode::TierMisalignment, tier.number, column, message);
}

Utterance build_utterance(const Block& block, const IgtOptions& options) {
  Utterance utt;
  utt.id = new_id();
  const Tier& tx = *block.tx;
  utt.phrase = text::nfc(text::trim(tx.value));
  if (block.ft) {
    utt.translation = Translation{text::nfc(text::trim(block.ft->value)), options.translation_lang};
  }

  const std::vector<Token> words = tokens_of(tx);
  if (words.empty()) misaligned(tx, end_column(tx), "\\tx tier is empty");

  if (block.mb.has_value() != block.gl.has_value()) {
    const Tier& present = block.mb ? *block.mb : *block.gl;
    misaligned(present, 1, block.mb ? "\\mb without \\gl" : "\\gl without \\mb");
  }

  if (!block.mb) {
    for (const Token& w : words) utt.words.push_back({text::nfc(w.text), {}, std::nullopt});
    utt.glossed = false;
    return utt;
  }

  const std::vector<Token> mbs = tokens_of(*block.mb);
  const std::vector<Token> gls = tokens_of(*block.gl);
  for (const auto* tier_tokens : {&mbs, &gls}) {
    const Tier& tier = tier_tokens == &mbs ? *block.mb : *block.gl;
    if (tier_tokens->size() != words.size()) {
      const std::size_t col = tier_tokens->size() > words.size() ? (*tier_tokens)[words.size()].column
                                                                 : end_column(tier);
      misaligned(tier, col,
                 std::to_string(tier_tokens->size()) + " tokens for " + std::to_string(words.size()) + " words");
    }
  }

  for (std::size_t j = 0; j < words.size(); ++j) {
    const Pieces mp = split_morphs(mbs[j].text);
    const Pieces gp = split_morphs(gls[j].text);
    if (mp.parts.size() != gp.parts.size()) {
      misaligned(*block.gl, gls[j].column,
                 "word " + std::to_string(j + 1) + ": " + std::to_string(mp.parts.size()) + " morphs but " +
                     std::to_string(gp.parts.size()) + " glosses");
    }
    if (mp.seps != gp.seps) {
      misaligned(*block.gl, gls[j].column,
                 "word " + std::to_string(j + 1) + ": gloss separators differ from morpheme separators");
    }
    for (std::size_t k = 0; k < mp.parts.size(); ++k) {
      if (mp.parts[k].empty()) misaligned(*block.mb, mbs[j].column, "empty morph in '" + std::string(mbs[j].text) + "'");
      if (gp.parts[k].empty()) misaligned(*block.gl, gls[j].column, "empty gloss in '" + std::string(gls[j].text) + "'");
    }
    const std::vector<MorphType> types = assign_types(mp, gp);
    Word word{text::nfc(words[j].text), {}, std::nullopt};
    for (std::size_t k = 0; k < mp.parts.size(); ++k) {
      word.morphs.push_back({text::nfc(mp.parts[k]), text::nfc(gp.parts[k]), types[k]});
    }
    utt.words.push_back(std::move(word));
  }
  utt.glossed = true;
  return utt;
}

}  // namespace

IgtParseResult parse_igt_text(std::string_view input, const IgtOptions& options) {
  IgtParseResult result;
  result.doc.id = new_id();
  result.doc.project_id = options.project_id;
  result.doc.title = options.title;

  auto finish = [&](const Block& b) {
    if (!b.tx) {
      const Tier& any = b.mb ? *b.mb : (b.gl ? *b.gl : *b.ft);
      throw ParseError(ErrorCode::TierMisalignment, any.number, 1, "block has no \\tx tier");
    }
    if (!b.ft) result.warnings.push_back({b.tx->number, 1, "block has no free translation"});
    result.doc.utterances.push_back(build_utterance(b, options));
  };

  std::vector<Block> blocks;
  bool in_block = false;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= input.size()) {
    std::size_t end = input.find('\n', pos);
    if (end == std::string_view::npos) end = input.size();
    std::string_view line = input.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++number;
    const bool last = end == input.size();
    pos = end + 1;

    if (text::trim(line).empty()) {
      if (in_block) finish(blocks.back());
      in_block = false;
    } else {
      if (line.front() != '\\') {
        throw ParseError(ErrorCode::UnknownLineMarker, number, 1, "line does not start with a tier marker");
      }
      std::size_t mend = 1;
      while (mend < line.size() && !text::is_space(line[mend])) ++mend;
      const std::string_view marker = line.substr(1, mend - 1);
      std::size_t vstart = mend;
      while (vstart < line.size() && text::is_space(line[vstart])) ++vstart;
      Tier tier{line, line.substr(vstart), vstart, number};

      if (!in_block) {
        blocks.emplace_back();
        in_block = true;
      }
      Block& b = blocks.back();
      std::optional<Tier>* slot = nullptr;
      if (marker == "tx") slot = &b.tx;
      else if (marker == "mb") slot = &b.mb;
      else if (marker == "gl") slot = &b.gl;
      else if (marker == "ft") slot = &b.ft;
      if (!slot) {
        throw ParseError(ErrorCode::UnknownLineMarker, number, 1,
                         "unknown tier marker \\" + std::string(marker));
      }
      if (slot->has_value()) {
        throw ParseError(ErrorCode::UnknownLineMarker, number, 1,
                         "repeated \\" + std::string(marker) + " in one block");
      }
      *slot = tier;
    }
    if (last) break;
  }
  if (in_block) finish(blocks.back());
  if (result.doc.utterances.empty()) throw ParseError(ErrorCode::EmptyInput, 1, 1, "no \\tx blocks found");
  return result;
}

}  // namespace life::ingest
