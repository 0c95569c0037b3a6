#include <charconv>

#include "life/error.hpp"
#include "life/ingest.hpp"
#include "life/text.hpp"

namespace life::ingest {

namespace {

std::optional<int> parse_int(std::string_view s) {
  s = text::trim(s);
  int n = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return n;
}

bool is_header(const CsvRow& row) {
  std::string joined;
  for (std::size_t i = 0; i < row.cells.size(); ++i) {
    if (i) joined += ',';
    joined += text::trim(row.cells[i]);
  }
  return joined == kEntryCsvHeader;
}

}  // namespace

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string cell;
  std::size_t line = 1;
  std::size_t row_no = 1;
  row.line = 1;
  bool quoted = false;
  bool cell_started = false;  // distinguishes an empty trailing line from a row
  std::size_t quote_line = 0;

  auto end_cell = [&] {
    row.cells.push_back(std::move(cell));
    cell.clear();
  };
  auto end_row = [&] {
    end_cell();
    row.row = row_no++;
    rows.push_back(std::move(row));
    row = CsvRow{};
    row.line = line;
    cell_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!cell.empty()) {
          throw ParseError(ErrorCode::CsvShapeError, line, 1,
                           "row " + std::to_string(row_no) + ": quote inside an unquoted field");
        }
        quoted = true;
        quote_line = line;
        cell_started = true;
        break;
      case ',':
        end_cell();
        cell_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        ++line;
        end_row();
        break;
      default:
        cell.push_back(c);
        cell_started = true;
    }
  }
  if (quoted) {
    throw ParseError(ErrorCode::CsvShapeError, quote_line, 1,
                     "row " + std::to_string(row_no) + ": unterminated quoted field");
  }
  if (cell_started || !cell.empty() || !row.cells.empty()) end_row();
  return rows;
}

std::string csv_escape(std::string_view cell) {
  if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_line(std::span<const std::string> cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(cells[i]);
  }
  out += "\r\n";
  return out;
}

std::string export_csv(std::span<const LexicalEntry> entries) {
  std::string out(kEntryCsvHeader);
  out += "\r\n";
  for (const LexicalEntry& e : entries) {
    const std::string hm = std::to_string(e.homonym_no);
    if (e.senses.empty()) {
      const std::vector<std::string> cells{e.headword, hm, e.pos, "", "", "", ""};
      out += csv_line(cells);
    }
    for (const Sense& s : e.senses) {
      const std::vector<std::string> cells{e.headword,          hm,
                                           e.pos,               std::to_string(s.sense_no),
                                           s.gloss,             s.definition.value_or(""),
                                           s.semantic_domain.value_or("")};
      out += csv_line(cells);
    }
  }
  return out;
}

std::vector<LexicalEntry> import_csv(std::string_view input, const std::string& project_id) {
  std::vector<LexicalEntry> entries;
  const auto rows = parse_csv(input);
  constexpr std::size_t kColumns = 7;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (r == 0 && is_header(row)) continue;
    if (row.cells.size() == 1 && row.cells[0].empty()) continue;  // blank line
    if (row.cells.size() != kColumns) {
      throw ParseError(ErrorCode::CsvShapeError, row.line, 1,
                       "row " + std::to_string(row.row) + ": expected 7 columns, found " +
                           std::to_string(row.cells.size()));
    }
    const std::string headword = text::nfc(text::trim(row.cells[0]));
    const auto hm = row.cells[1].empty() ? std::optional<int>(1) : parse_int(row.cells[1]);
    if (!hm || *hm < 1) {
      throw ParseError(ErrorCode::CsvShapeError, row.line, 1,
                       "row " + std::to_string(row.row) + ": homonym_no is not a positive integer");
    }
    if (entries.empty() || entries.back().headword != headword || entries.back().homonym_no != *hm) {
      LexicalEntry e;
      e.id = new_id();
      e.project_id = project_id;
      e.headword = headword;
      e.homonym_no = *hm;
      e.pos = text::nfc(text::trim(row.cells[2]));
      entries.push_back(std::move(e));
    }
    LexicalEntry& e = entries.back();
    const bool has_sense = !row.cells[3].empty() || !row.cells[4].empty() || !row.cells[5].empty() ||
                           !row.cells[6].empty();
    if (!has_sense) continue;
    Sense s;
    s.sense_no = static_cast<int>(e.senses.size()) + 1;
    if (!row.cells[3].empty()) {
      const auto n = parse_int(row.cells[3]);
      if (!n) {
        throw ParseError(ErrorCode::CsvShapeError, row.line, 1,
                         "row " + std::to_string(row.row) + ": sense_no is not an integer");
      }
      s.sense_no = *n;
    }
    s.gloss = text::nfc(row.cells[4]);
    if (!row.cells[5].empty()) s.definition = text::nfc(row.cells[5]);
    if (!row.cells[6].empty()) s.semantic_domain = text::nfc(row.cells[6]);
    e.senses.push_back(std::move(s));
  }
  return entries;
}

}  // namespace life::ingest
