#include <algorithm>
#include <charconv>
#include <regex>

#include "life/error.hpp"
#include "life/ingest.hpp"
#include "life/text.hpp"

namespace life::ingest {

namespace {

struct Line {
  std::string_view text;
  std::size_t number;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  std::size_t number = 1;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({line, number++});
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// "2021-03-04" or Toolbox style "04/Mar/2021".
bool is_well_formed_date(std::string_view v) {
  static const std::regex iso(R"(\d{4}-\d{2}-\d{2})");
  static const std::regex toolbox(R"(\d{1,2}/[A-Za-z]{3}/\d{4})");
  const std::string s(v);
  return std::regex_match(s, iso) || std::regex_match(s, toolbox);
}

void join_into(std::string& target, const std::string& value) {
  if (target.empty()) {
    target = value;
  } else {
    target += "; ";
    target += value;
  }
}

class EntryBuilder {
 public:
  EntryBuilder(const SfmRecord& record, const SfmOptions& options,
               std::vector<ParseWarning>& warnings)
      : record_(record), warnings_(warnings) {
    entry_.id = new_id();
    entry_.project_id = options.project_id;
  }

  LexicalEntry build() {
    bool saw_ps = false;
    bool saw_gloss_or_def = false;
    for (const SfmField& f : record_.fields) {
      const std::string value = text::nfc(f.value);
      const std::string& m = f.marker;
      if (m == "lx") {
        entry_.headword = value;
        if (value.empty()) warn(f, "empty headword");
      } else if (m == "hm") {
        int n = 0;
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
        if (ec != std::errc{} || p != value.data() + value.size() || n < 1) {
          warn(f, "ignoring malformed homonym number '" + value + "'");
        } else {
          entry_.homonym_no = n;
        }
      } else if (m == "ps") {
        if (saw_ps) warn(f, "repeated \\ps joined to the first");
        saw_ps = true;
        join_into(entry_.pos, value);
      } else if (m == "sn") {
        entry_.senses.emplace_back();
        awaiting_translation_ = false;
      } else if (m == "ge") {
        saw_gloss_or_def = true;
        Sense& s = sense();
        if (!s.gloss.empty()) warn(f, "repeated \\ge joined within the sense");
        join_into(s.gloss, value);
      } else if (m == "de") {
        saw_gloss_or_def = true;
        Sense& s = sense();
        if (s.definition) {
          warn(f, "repeated \\de joined within the sense");
          join_into(*s.definition, value);
        } else {
          s.definition = value;
        }
      } else if (m == "sd") {
        Sense& s = sense();
        if (s.semantic_domain) {
          warn(f, "repeated \\sd joined within the sense");
          join_into(*s.semantic_domain, value);
        } else {
          s.semantic_domain = value;
        }
      } else if (m == "xv") {
        sense().examples.push_back({value, {}});
        awaiting_translation_ = true;
      } else if (m == "xe") {
        Sense& s = sense();
        if (awaiting_translation_ && !s.examples.empty()) {
          s.examples.back().translation = value;
        } else {
          s.examples.push_back({{}, value});
        }
        awaiting_translation_ = false;
      } else if (m == "va") {
        entry_.variants.push_back(value);
      } else if (m == "dt") {
        if (is_well_formed_date(value)) {
          entry_.extras.push_back({m, value});
        } else {
          warn(f, "ignoring malformed date '" + value + "'");
        }
      } else {
        // sf/pc (media filenames) and every unknown marker are kept verbatim.
        entry_.extras.push_back({m, value});
      }
    }
    for (std::size_t i = 0; i < entry_.senses.size(); ++i) {
      entry_.senses[i].sense_no = static_cast<int>(i) + 1;
    }
    const SfmField& lx = record_.fields.front();
    if (!saw_ps) warnings_.push_back({lx.line, 1, "record '" + entry_.headword + "' has no \\ps"});
    if (!saw_gloss_or_def) {
      warnings_.push_back({lx.line, 1, "record '" + entry_.headword + "' has no \\ge or \\de"});
    }
    return std::move(entry_);
  }

 private:
  Sense& sense() {
    if (entry_.senses.empty()) entry_.senses.emplace_back();
    return entry_.senses.back();
  }

  void warn(const SfmField& f, std::string message) {
    warnings_.push_back({f.line, f.column, std::move(message)});
  }

  const SfmRecord& record_;
  std::vector<ParseWarning>& warnings_;
  LexicalEntry entry_;
  bool awaiting_translation_ = false;
};

void emit(std::string& out, std::string_view marker, std::string_view value) {
  out += '\\';
  out += marker;
  if (!value.empty()) {
    out += ' ';
    for (char c : value) out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  out += '\n';
}

bool sense_is_blank(const Sense& s) {
  return s.gloss.empty() && !s.definition && !s.semantic_domain && s.examples.empty();
}

}  // namespace

std::vector<SfmRecord> split_sfm_records(std::string_view text) {
  bool any_content = false;
  for (char c : text) {
    if (!text::is_space(c)) {
      any_content = true;
      break;
    }
  }
  if (!any_content) throw ParseError(ErrorCode::EmptyInput, 1, 1, "input is empty");

  std::vector<SfmRecord> records;
  for (const Line& line : split_lines(text)) {
    if (text::trim(line.text).empty()) continue;
    if (line.text.front() != '\\') {
      if (records.empty()) {
        throw ParseError(ErrorCode::ContentBeforeFirstRecord, line.number, 1,
                         "content before the first \\lx record");
      }
      SfmField& prev = records.back().fields.back();
      const std::string_view more = text::trim(line.text);
      if (!prev.value.empty()) prev.value += ' ';
      prev.value += more;
      continue;
    }

    std::size_t end = 1;
    while (end < line.text.size() && !text::is_space(line.text[end])) ++end;
    SfmField field;
    field.marker = ascii_lower(line.text.substr(1, end - 1));
    field.line = line.number;
    std::size_t vstart = end;
    while (vstart < line.text.size() && text::is_space(line.text[vstart])) ++vstart;
    field.column = text::column_of(line.text, vstart);
    field.value = std::string(text::trim(line.text.substr(vstart)));

    if (field.marker == "lx") {
      records.emplace_back();
    } else if (records.empty()) {
      if (text::starts_with(field.marker, "_")) continue;
      throw ParseError(ErrorCode::ContentBeforeFirstRecord, line.number, 1,
                       "\\" + field.marker + " appears before the first \\lx record");
    }
    records.back().fields.push_back(std::move(field));
  }
  if (records.empty()) throw ParseError(ErrorCode::EmptyInput, 1, 1, "no \\lx records found");
  return records;
}

SfmParseResult parse_sfm_lexicon(std::string_view text, const SfmOptions& options) {
  SfmParseResult result;
  for (const SfmRecord& record : split_sfm_records(text)) {
    for (const SfmField& f : record.fields) {
      if (f.marker.empty()) result.warnings.push_back({f.line, 1, "bare backslash with no marker"});
    }
    result.entries.push_back(EntryBuilder(record, options, result.warnings).build());
  }
  return result;
}

std::string serialize_sfm_lexicon(std::span<const LexicalEntry> entries) {
  std::string out;
  bool first = true;
  for (const LexicalEntry& e : entries) {
    if (!first) out += '\n';
    first = false;
    emit(out, "lx", e.headword);
    if (e.homonym_no != 1) emit(out, "hm", std::to_string(e.homonym_no));
    if (!e.pos.empty()) emit(out, "ps", e.pos);
    // A lone sense needs no \sn unless it would otherwise leave no trace.
    const bool numbered = e.senses.size() > 1 || (e.senses.size() == 1 && sense_is_blank(e.senses[0]));
    for (const Sense& s : e.senses) {
      if (numbered) emit(out, "sn", std::to_string(s.sense_no));
      if (!s.gloss.empty()) emit(out, "ge", s.gloss);
      if (s.definition) emit(out, "de", *s.definition);
      if (s.semantic_domain) emit(out, "sd", *s.semantic_domain);
      for (const Example& ex : s.examples) {
        emit(out, "xv", ex.vernacular);
        if (!ex.translation.empty()) emit(out, "xe", ex.translation);
      }
    }
    for (const std::string& v : e.variants) emit(out, "va", v);
    for (const ExtraField& x : e.extras) emit(out, x.marker, x.value);
  }
  return out;
}

}  // namespace life::ingest
