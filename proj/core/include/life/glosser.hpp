#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "life/codec.hpp"
#include "life/model.hpp"

// Count-based auto-glosser. Models are plain values: update() returns a new
// model and never touches its argument.
namespace life::gloss {

// Indexed by MorphType: prefix, root, suffix, clitic.
using PositionCounts = std::array<std::int64_t, 4>;

struct GlossModel {
  std::string project_id;
  std::int64_t version = 0;
  std::int64_t trained_on = 0;  // utterances
  std::map<std::string, std::map<std::string, std::int64_t>> morph_counts;
  std::map<std::string, PositionCounts> position_counts;
  std::int64_t total_morph_tokens = 0;

  // Equality of the count tables, ignoring version.
  bool same_tables(const GlossModel& other) const;
  bool operator==(const GlossModel&) const = default;
};

struct Segment {
  std::string form;
  MorphType type = MorphType::Root;
  bool operator==(const Segment&) const = default;
};

struct SuggestedMorph {
  std::string form;
  MorphType type = MorphType::Root;
  std::string gloss;
  double confidence = 0.0;
  bool operator==(const SuggestedMorph&) const = default;
};

struct GlossSuggestion {
  std::string word;
  std::vector<SuggestedMorph> morphs;
  double score = 0.0;
  bool external = false;  // came from imported predictions
  bool operator==(const GlossSuggestion&) const = default;
};

struct Metrics {
  double morph_gloss_accuracy = 0.0;
  double seg_precision = 0.0;
  double seg_recall = 0.0;
  double seg_f1 = 0.0;
  std::size_t n_utterances = 0;
};

struct GlossCount {
  std::string gloss;
  std::int64_t count = 0;
  bool operator==(const GlossCount&) const = default;
};

struct AffixRow {
  std::string form;
  MorphType type = MorphType::Suffix;
  std::int64_t count = 0;
  std::vector<GlossCount> glosses;  // descending count, ties by gloss
  std::vector<std::string> examples;  // utterance ids, at most 3
};

struct SketchReport {
  std::vector<AffixRow> affixes;
  std::map<std::string, std::int64_t> gloss_frequency;
  std::map<std::string, std::int64_t> pos_distribution;
};

enum class UpdateOp { Add, Remove };

// Utterances with glossed=false are skipped. Each lexicon entry adds one
// root observation of (headword, first sense gloss).
GlossModel train(std::span<const Utterance> corpus, std::span<const LexicalEntry> lexicon = {},
                 std::string project_id = {});

// Throws Error(InvalidArgument) for an unglossed utterance and
// Error(UnderflowRemoval) when removing counts the model does not hold.
GlossModel update(const GlossModel& model, const Utterance& utt, UpdateOp op);

// Score of one segment: log(count + 1) - log(total_morph_tokens + 1).
double segment_score(const GlossModel& model, std::string_view form);

// Most frequent position, ties resolved root > suffix > prefix > clitic.
// Unknown forms are roots.
MorphType dominant_type(const GlossModel& model, std::string_view form);

// Best cover of the word by known forms: highest total score, then fewer
// segments, then longer leading segments. Falls back to the whole word.
std::vector<Segment> segment(const GlossModel& model, std::string_view word);

// Word-level predictions imported from an external model, keyed by word.
using ExternalPredictions = std::map<std::string, GlossSuggestion>;

GlossSuggestion suggest(const GlossModel& model, std::string_view word,
                        const ExternalPredictions* external = nullptr);

// Throws Error(EmptyHeldout) when there is no glossed utterance to score.
Metrics evaluate(const GlossModel& model, std::span<const Utterance> heldout);

// One JSON object per word of every glossed utterance.
std::string export_training_data(std::span<const Utterance> corpus);

// Throws SchemaError with where() == "line N".
std::vector<GlossSuggestion> import_predictions(std::string_view jsonl);
ExternalPredictions index_predictions(std::vector<GlossSuggestion> predictions);

SketchReport sketch_summary(std::span<const Utterance> corpus, const GlossModel& model);

codec::Json to_json(const GlossModel& model);
GlossModel model_from_json(const codec::Json& j);
codec::Json to_json(const GlossSuggestion& s);
codec::Json to_json(const Metrics& m);
codec::Json to_json(const SketchReport& r);

}  // namespace life::gloss
