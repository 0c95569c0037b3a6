#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "life/model.hpp"

// Interchange formats: Toolbox/SFM lexicons, backslash-tiered IGT text,
// RFC 4180 CSV and the canonical JSON project manifest.
namespace life::ingest {

struct ParseWarning {
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based, code points
  std::string message;

  bool operator==(const ParseWarning&) const = default;
};

// ---------------------------------------------------------------------------
// SFM / MDF lexicon

struct SfmField {
  std::string marker;  // without the backslash, lowercase
  std::string value;
  std::size_t line = 1;
  std::size_t column = 1;  // where the value starts
};

// One record; the first field is always "lx".
struct SfmRecord {
  std::vector<SfmField> fields;
};

struct SfmOptions {
  std::string project_id;
};

struct SfmParseResult {
  std::vector<LexicalEntry> entries;
  std::vector<ParseWarning> warnings;
};

// Splits text into records at \lx, folding continuation lines into the
// preceding field. Lines beginning "\_" ahead of the first record (Toolbox
// file headers) are skipped.
std::vector<SfmRecord> split_sfm_records(std::string_view text);

SfmParseResult parse_sfm_lexicon(std::string_view text, const SfmOptions& options = {});
std::string serialize_sfm_lexicon(std::span<const LexicalEntry> entries);

// ---------------------------------------------------------------------------
// Interlinear text with \tx \mb \gl \ft tiers

struct IgtOptions {
  std::string project_id;
  std::string title;
  std::string translation_lang = "en";
};

struct IgtParseResult {
  IGTDocument doc;
  std::vector<ParseWarning> warnings;
};

IgtParseResult parse_igt_text(std::string_view text, const IgtOptions& options = {});

// ---------------------------------------------------------------------------
// CSV

struct CsvRow {
  std::size_t row = 1;  // 1-based record number in the file
  std::size_t line = 1;
  std::vector<std::string> cells;
};

std::vector<CsvRow> parse_csv(std::string_view text);
std::string csv_escape(std::string_view cell);
std::string csv_line(std::span<const std::string> cells);

inline constexpr std::string_view kEntryCsvHeader =
    "headword,homonym_no,pos,sense_no,gloss,definition,semantic_domain";

std::string export_csv(std::span<const LexicalEntry> entries);
std::vector<LexicalEntry> import_csv(std::string_view text, const std::string& project_id = {});

// ---------------------------------------------------------------------------
// JSON manifest

inline constexpr int kFormatVersion = 1;

struct ProjectData {
  Project project;
  std::vector<LexicalEntry> entries;
  std::vector<IGTDocument> texts;
  std::vector<MediaAsset> assets;

  bool operator==(const ProjectData&) const = default;
};

// Revisions are not exported; the manifest's "revision_policy" field records
// that importers regenerate them.
std::string export_json(const ProjectData& data);
ProjectData import_json(std::string_view bytes);

}  // namespace life::ingest
