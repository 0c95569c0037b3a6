#include "life/glosser.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "life/error.hpp"
#include "life/text.hpp"

namespace life::gloss {

namespace {

using codec::Json;

constexpr double kEps = 1e-9;

std::size_t slot(MorphType t) { return static_cast<std::size_t>(t); }

void add_token(GlossModel& m, const std::string& form, const std::string& gloss, MorphType type) {
  ++m.morph_counts[form][gloss];
  ++m.position_counts[form][slot(type)];
  ++m.total_morph_tokens;
}

struct Tally {
  std::map<std::pair<std::string, std::string>, std::int64_t> glosses;
  std::map<std::pair<std::string, std::size_t>, std::int64_t> positions;
  std::int64_t tokens = 0;
};

Tally tally(const Utterance& utt) {
  Tally t;
  for (const Word& w : utt.words) {
    for (const Morph& m : w.morphs) {
      ++t.glosses[{m.form, m.gloss}];
      ++t.positions[{m.form, slot(m.type)}];
      ++t.tokens;
    }
  }
  return t;
}

// Majority gloss, ties to the lexicographically smallest.
std::pair<std::string, double> top_gloss(const GlossModel& model, const std::string& form) {
  auto it = model.morph_counts.find(form);
  if (it == model.morph_counts.end() || it->second.empty()) return {"", 0.0};
  std::int64_t total = 0;
  const std::pair<const std::string, std::int64_t>* best = nullptr;
  for (const auto& entry : it->second) {
    total += entry.second;
    if (!best || entry.second > best->second) best = &entry;  // map order keeps the smallest on ties
  }
  return {best->first, static_cast<double>(best->second) / static_cast<double>(total)};
}

std::vector<GlossCount> ranked_glosses(const std::map<std::string, std::int64_t>& counts) {
  std::vector<GlossCount> out;
  for (const auto& [g, c] : counts) out.push_back({g, c});
  std::stable_sort(out.begin(), out.end(), [](const GlossCount& a, const GlossCount& b) { return a.count > b.count; });
  return out;
}

SuggestedMorph suggest_morph(const GlossModel& model, const Segment& seg) {
  const auto [gloss, confidence] = top_gloss(model, seg.form);
  return {seg.form, seg.type, gloss, confidence};
}

}  // namespace

bool GlossModel::same_tables(const GlossModel& other) const {
  return trained_on == other.trained_on && morph_counts == other.morph_counts &&
         position_counts == other.position_counts && total_morph_tokens == other.total_morph_tokens;
}

GlossModel train(std::span<const Utterance> corpus, std::span<const LexicalEntry> lexicon, std::string project_id) {
  GlossModel m;
  m.project_id = std::move(project_id);
  for (const Utterance& u : corpus) {
    if (!u.glossed) continue;
    ++m.trained_on;
    for (const Word& w : u.words) {
      for (const Morph& morph : w.morphs) add_token(m, morph.form, morph.gloss, morph.type);
    }
  }
  for (const LexicalEntry& e : lexicon) {
    if (e.headword.empty() || e.senses.empty() || e.senses.front().gloss.empty()) continue;
    add_token(m, e.headword, e.senses.front().gloss, MorphType::Root);
  }
  m.version = m.morph_counts.empty() && m.trained_on == 0 ? 0 : 1;
  return m;
}

GlossModel update(const GlossModel& model, const Utterance& utt, UpdateOp op) {
  if (!utt.glossed) throw Error(ErrorCode::InvalidArgument, "utterance " + utt.id + " is not glossed");
  GlossModel m = model;
  const Tally t = tally(utt);
  if (op == UpdateOp::Add) {
    for (const auto& [key, n] : t.glosses) m.morph_counts[key.first][key.second] += n;
    for (const auto& [key, n] : t.positions) m.position_counts[key.first][key.second] += n;
    m.total_morph_tokens += t.tokens;
    ++m.trained_on;
  } else {
    auto underflow = [&] {
      return Error(ErrorCode::UnderflowRemoval, "model does not contain utterance " + utt.id);
    };
    if (m.trained_on < 1) throw underflow();
    for (const auto& [key, n] : t.glosses) {
      auto f = m.morph_counts.find(key.first);
      if (f == m.morph_counts.end()) throw underflow();
      auto g = f->second.find(key.second);
      if (g == f->second.end() || g->second < n) throw underflow();
    }
    for (const auto& [key, n] : t.positions) {
      auto f = m.position_counts.find(key.first);
      if (f == m.position_counts.end() || f->second[key.second] < n) throw underflow();
    }
    for (const auto& [key, n] : t.glosses) {
      auto f = m.morph_counts.find(key.first);
      if ((f->second[key.second] -= n) == 0) f->second.erase(key.second);
      if (f->second.empty()) m.morph_counts.erase(f);
    }
    for (const auto& [key, n] : t.positions) {
      auto f = m.position_counts.find(key.first);
      f->second[key.second] -= n;
      if (std::all_of(f->second.begin(), f->second.end(), [](std::int64_t c) { return c == 0; })) {
        m.position_counts.erase(f);
      }
    }
    m.total_morph_tokens -= t.tokens;
    --m.trained_on;
  }
  ++m.version;
  return m;
}

double segment_score(const GlossModel& model, std::string_view form) {
  std::int64_t count = 0;
  if (auto it = model.morph_counts.find(std::string(form)); it != model.morph_counts.end()) {
    for (const auto& [_, c] : it->second) count += c;
  }
  return std::log(static_cast<double>(count) + 1.0) - std::log(static_cast<double>(model.total_morph_tokens) + 1.0);
}

MorphType dominant_type(const GlossModel& model, std::string_view form) {
  auto it = model.position_counts.find(std::string(form));
  if (it == model.position_counts.end()) return MorphType::Root;
  const PositionCounts& c = it->second;
  MorphType best = MorphType::Root;
  for (MorphType t : {MorphType::Suffix, MorphType::Prefix, MorphType::Clitic}) {
    if (c[slot(t)] > c[slot(best)]) best = t;
  }
  return best;
}

std::vector<Segment> segment(const GlossModel& model, std::string_view word) {
  const std::vector<std::size_t> cuts = text::boundaries(word);
  const std::size_t n = cuts.size() - 1;  // code points
  if (n == 0) return {};

  struct Best {
    bool reachable = false;
    double score = 0.0;
    std::size_t segments = 0;
    std::size_t next = 0;  // boundary index after the first segment
  };
  // best[i] covers word[cuts[i]..end].
  std::vector<Best> best(n + 1);
  best[n] = {true, 0.0, 0, n};
  for (std::size_t i = n; i-- > 0;) {
    // Longest first so that equal candidates keep the longer leading segment.
    for (std::size_t j = n; j > i; --j) {
      if (!best[j].reachable) continue;
      const std::string form(word.substr(cuts[i], cuts[j] - cuts[i]));
      if (!model.morph_counts.count(form)) continue;
      const double score = segment_score(model, form) + best[j].score;
      const std::size_t segments = best[j].segments + 1;
      Best& b = best[i];
      const bool better = !b.reachable || score > b.score + kEps ||
                          (std::abs(score - b.score) <= kEps && segments < b.segments);
      if (better) b = {true, score, segments, j};
    }
  }

  if (!best[0].reachable) return {{std::string(word), MorphType::Root}};
  std::vector<Segment> out;
  for (std::size_t i = 0; i < n; i = best[i].next) {
    std::string form(word.substr(cuts[i], cuts[best[i].next] - cuts[i]));
    const MorphType type = dominant_type(model, form);
    out.push_back({std::move(form), type});
  }
  return out;
}

GlossSuggestion suggest(const GlossModel& model, std::string_view word, const ExternalPredictions* external) {
  const std::string w = text::nfc(word);
  if (external) {
    if (auto it = external->find(w); it != external->end()) {
      GlossSuggestion s = it->second;
      s.external = true;
      return s;
    }
  }
  GlossSuggestion s;
  s.word = w;
  for (const Segment& seg : segment(model, w)) {
    s.morphs.push_back(suggest_morph(model, seg));
    s.score += segment_score(model, seg.form);
  }
  return s;
}

Metrics evaluate(const GlossModel& model, std::span<const Utterance> heldout) {
  Metrics m;
  m.n_utterances = heldout.size();
  std::int64_t gold_tokens = 0, correct = 0;
  std::int64_t gold_bounds = 0, pred_bounds = 0, hit_bounds = 0;
  bool any = false;
  for (const Utterance& u : heldout) {
    if (!u.glossed) continue;
    any = true;
    for (const Word& w : u.words) {
      if (w.morphs.empty()) continue;
      // Gold spans in code points; the word is the concatenation of its morphs.
      std::string joined;
      std::vector<std::pair<std::size_t, std::size_t>> gold;
      std::size_t at = 0;
      for (const Morph& morph : w.morphs) {
        joined += morph.form;
        const std::size_t len = text::length(morph.form);
        gold.emplace_back(at, at + len);
        at += len;
      }
      const std::vector<Segment> pred = segment(model, joined);
      std::map<std::pair<std::size_t, std::size_t>, std::string> pred_spans;
      std::set<std::size_t> pb, gb;
      at = 0;
      for (const Segment& seg : pred) {
        const std::size_t len = text::length(seg.form);
        pred_spans[{at, at + len}] = top_gloss(model, seg.form).first;
        at += len;
        if (at < text::length(joined)) pb.insert(at);
      }
      for (std::size_t k = 0; k + 1 < gold.size(); ++k) gb.insert(gold[k].second);
      gold_bounds += static_cast<std::int64_t>(gb.size());
      pred_bounds += static_cast<std::int64_t>(pb.size());
      for (std::size_t b : pb) hit_bounds += gb.count(b) ? 1 : 0;

      for (std::size_t k = 0; k < gold.size(); ++k) {
        ++gold_tokens;
        auto it = pred_spans.find(gold[k]);
        if (it != pred_spans.end() && it->second == w.morphs[k].gloss) ++correct;
      }
    }
  }
  if (!any) throw Error(ErrorCode::EmptyHeldout, "held-out set contains no glossed utterance");

  m.morph_gloss_accuracy = gold_tokens ? static_cast<double>(correct) / static_cast<double>(gold_tokens) : 1.0;
  m.seg_precision = pred_bounds ? static_cast<double>(hit_bounds) / static_cast<double>(pred_bounds) : 1.0;
  m.seg_recall = gold_bounds ? static_cast<double>(hit_bounds) / static_cast<double>(gold_bounds) : 1.0;
  const double sum = m.seg_precision + m.seg_recall;
  m.seg_f1 = sum > 0 ? 2.0 * m.seg_precision * m.seg_recall / sum : 0.0;
  return m;
}

std::string export_training_data(std::span<const Utterance> corpus) {
  std::string out;
  for (const Utterance& u : corpus) {
    if (!u.glossed) continue;
    for (const Word& w : u.words) {
      Json morphs = Json::array();
      for (const Morph& m : w.morphs) {
        morphs.push_back({{"form", m.form}, {"type", to_string(m.type)}, {"gloss", m.gloss}});
      }
      out += codec::canonical(Json{{"word", w.surface}, {"morphs", morphs}});
      out += '\n';
    }
  }
  return out;
}

std::vector<GlossSuggestion> import_predictions(std::string_view jsonl) {
  std::vector<GlossSuggestion> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    const std::string_view line = text::trim(jsonl.substr(pos, end - pos));
    pos = end + 1;
    ++number;
    if (line.empty()) continue;

    const std::string where = "line " + std::to_string(number);
    auto fail = [&](const std::string& msg) { return SchemaError(where, msg); };
    const Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) throw fail("not valid JSON");
    if (!j.is_object()) throw fail("expected a JSON object");
    auto word = j.find("word");
    if (word == j.end() || !word->is_string() || word->get<std::string>().empty()) {
      throw fail("missing string field \"word\"");
    }
    auto morphs = j.find("morphs");
    if (morphs == j.end() || !morphs->is_array()) throw fail("missing array field \"morphs\"");

    GlossSuggestion s;
    s.word = text::nfc(word->get<std::string>());
    s.external = true;
    for (std::size_t k = 0; k < morphs->size(); ++k) {
      const Json& m = (*morphs)[k];
      const std::string at = "morphs[" + std::to_string(k) + "]";
      if (!m.is_object()) throw fail(at + " is not an object");
      auto form = m.find("form");
      auto gloss = m.find("gloss");
      if (form == m.end() || !form->is_string()) throw fail(at + " has no string \"form\"");
      if (gloss == m.end() || !gloss->is_string()) throw fail(at + " has no string \"gloss\"");
      SuggestedMorph sm{text::nfc(form->get<std::string>()), MorphType::Root, gloss->get<std::string>(), 1.0};
      if (auto type = m.find("type"); type != m.end()) {
        const auto parsed = type->is_string() ? parse_morph_type(type->get<std::string>()) : std::nullopt;
        if (!parsed) throw fail(at + " has an unknown \"type\"");
        sm.type = *parsed;
      }
      if (auto conf = m.find("confidence"); conf != m.end()) {
        if (!conf->is_number() || conf->get<double>() < 0.0 || conf->get<double>() > 1.0) {
          throw fail(at + " \"confidence\" must be a number in [0, 1]");
        }
        sm.confidence = conf->get<double>();
      }
      s.morphs.push_back(std::move(sm));
    }
    out.push_back(std::move(s));
  }
  return out;
}

ExternalPredictions index_predictions(std::vector<GlossSuggestion> predictions) {
  ExternalPredictions out;
  // Later lines replace earlier ones for the same word.
  for (auto& p : predictions) out[p.word] = std::move(p);
  return out;
}

SketchReport sketch_summary(std::span<const Utterance> corpus, const GlossModel& model) {
  SketchReport r;
  std::map<std::string, std::vector<std::string>> examples;
  for (const Utterance& u : corpus) {
    std::set<std::string> seen;
    for (const Word& w : u.words) {
      if (w.pos) ++r.pos_distribution[*w.pos];
      for (const Morph& m : w.morphs) {
        ++r.gloss_frequency[m.gloss];
        if (seen.insert(m.form).second) {
          auto& ex = examples[m.form];
          if (ex.size() < 3) ex.push_back(u.id);
        }
      }
    }
  }
  for (const auto& [form, glosses] : model.morph_counts) {
    const MorphType type = dominant_type(model, form);
    if (type == MorphType::Root) continue;
    AffixRow row;
    row.form = form;
    row.type = type;
    for (const auto& [_, c] : glosses) row.count += c;
    row.glosses = ranked_glosses(glosses);
    if (auto it = examples.find(form); it != examples.end()) row.examples = it->second;
    r.affixes.push_back(std::move(row));
  }
  std::stable_sort(r.affixes.begin(), r.affixes.end(),
                   [](const AffixRow& a, const AffixRow& b) { return a.count > b.count; });
  return r;
}

Json to_json(const GlossModel& model) {
  Json counts = Json::object();
  for (const auto& [form, glosses] : model.morph_counts) {
    Json g = Json::object();
    for (const auto& [gloss, c] : glosses) g[gloss] = c;
    counts[form] = g;
  }
  Json positions = Json::object();
  for (const auto& [form, c] : model.position_counts) {
    positions[form] = {{"prefix", c[0]}, {"root", c[1]}, {"suffix", c[2]}, {"clitic", c[3]}};
  }
  return {{"project_id", model.project_id},
          {"version", model.version},
          {"trained_on", model.trained_on},
          {"morph_counts", counts},
          {"position_counts", positions},
          {"total_morph_tokens", model.total_morph_tokens}};
}

GlossModel model_from_json(const Json& j) {
  try {
    GlossModel m;
    m.project_id = j.value("project_id", "");
    m.version = j.at("version").get<std::int64_t>();
    m.trained_on = j.at("trained_on").get<std::int64_t>();
    for (const auto& [form, glosses] : j.at("morph_counts").items()) {
      for (const auto& [gloss, c] : glosses.items()) m.morph_counts[form][gloss] = c.get<std::int64_t>();
    }
    for (const auto& [form, c] : j.at("position_counts").items()) {
      m.position_counts[form] = {c.at("prefix").get<std::int64_t>(), c.at("root").get<std::int64_t>(),
                                 c.at("suffix").get<std::int64_t>(), c.at("clitic").get<std::int64_t>()};
    }
    m.total_morph_tokens = j.at("total_morph_tokens").get<std::int64_t>();
    return m;
  } catch (const Json::exception& e) {
    throw SchemaError("", std::string("malformed gloss model: ") + e.what());
  }
}

Json to_json(const GlossSuggestion& s) {
  Json morphs = Json::array();
  for (const SuggestedMorph& m : s.morphs) {
    morphs.push_back(
        {{"form", m.form}, {"type", to_string(m.type)}, {"gloss", m.gloss}, {"confidence", m.confidence}});
  }
  return {{"word", s.word}, {"morphs", morphs}, {"score", s.score}, {"source", s.external ? "external" : "model"}};
}

Json to_json(const Metrics& m) {
  return {{"morph_gloss_accuracy", m.morph_gloss_accuracy},
          {"seg_precision", m.seg_precision},
          {"seg_recall", m.seg_recall},
          {"seg_f1", m.seg_f1},
          {"n_utterances", m.n_utterances}};
}

Json to_json(const SketchReport& r) {
  Json affixes = Json::array();
  for (const AffixRow& a : r.affixes) {
    Json glosses = Json::array();
    for (const GlossCount& g : a.glosses) glosses.push_back({{"gloss", g.gloss}, {"count", g.count}});
    affixes.push_back({{"form", a.form},
                       {"type", to_string(a.type)},
                       {"count", a.count},
                       {"glosses", glosses},
                       {"examples", a.examples}});
  }
  return {{"affixes", affixes}, {"gloss_frequency", r.gloss_frequency}, {"pos_distribution", r.pos_distribution}};
}

}  // namespace life::gloss
