#include <gtest/gtest.h>

#include <set>

#include "generators.hpp"
#include "life/error.hpp"
#include "life/model.hpp"
#include "life/text.hpp"

using namespace life;

TEST(Text, NfcComposesDecomposedInput) {
  EXPECT_EQ(text::nfc("e\xCC\x81"), "\xC3\xA9");
  EXPECT_EQ(text::nfc("plain"), "plain");
}

TEST(Text, LowerHandlesNonAscii) {
  EXPECT_EQ(text::lower("ÉCOLE Ŋoma"), "école ŋoma");
}

TEST(Text, BoundariesAndColumns) {
  const std::string s = "aŋb";
  EXPECT_EQ(text::boundaries(s), (std::vector<std::size_t>{0, 1, 3, 4}));
  EXPECT_EQ(text::length(s), 3u);
  EXPECT_EQ(text::column_of(s, 3), 3u);
}

TEST(Text, WhitespaceHelpers) {
  EXPECT_EQ(text::trim("  a b \t"), "a b");
  EXPECT_EQ(text::normalize_ws("  a \t b\n c "), "a b c");
  const auto parts = text::split_ws(" x  y\tz ");
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[2], "z");
}

TEST(Model, RolesRoundTrip) {
  for (Role r : {Role::Owner, Role::Editor, Role::Viewer}) EXPECT_EQ(parse_role(to_string(r)), r);
  EXPECT_FALSE(parse_role("admin"));
}

TEST(Model, NewIdsAreValidAndDistinct) {
  std::set<std::string> seen;
  for (int i = 0; i < 200; ++i) {
    const std::string id = new_id();
    EXPECT_TRUE(is_valid_id(id));
    EXPECT_TRUE(seen.insert(id).second);
  }
  EXPECT_FALSE(is_valid_id("ABCDEF"));
}

TEST(Model, Slugify) {
  EXPECT_EQ(slugify("Swahili Demo!"), "swahili-demo");
  EXPECT_EQ(slugify("--A  b--"), "a-b");
  EXPECT_THROW(slugify("!!!"), Error);
}

TEST(Model, NameChecks) {
  EXPECT_TRUE(is_valid_username("alice_01"));
  EXPECT_FALSE(is_valid_username("Al"));
  EXPECT_FALSE(is_valid_username("Alice"));
  EXPECT_TRUE(is_valid_language_code("swh"));
  EXPECT_FALSE(is_valid_language_code("sw"));
  EXPECT_FALSE(is_valid_slug("-x"));
}

TEST(Model, MediaKinds) {
  EXPECT_EQ(media_kind_for_mime("audio/ogg"), MediaKind::Audio);
  EXPECT_EQ(media_kind_for_mime("image/png"), MediaKind::Image);
  EXPECT_FALSE(media_kind_for_mime("application/pdf"));
}

TEST(Model, ValidEntryPasses) {
  testsupport::Rng rng(1);
  const Project p = testsupport::test_project();
  for (int i = 0; i < 50; ++i) {
    const LexicalEntry e = testsupport::random_entry(rng, p.id);
    EXPECT_TRUE(validate_entry(e, p).ok);
  }
}

TEST(Model, EntryErrorsCarryPaths) {
  const Project p = testsupport::test_project();
  LexicalEntry e;
  e.id = new_id();
  e.headword = "  ";
  e.senses = {Sense{2, "", std::nullopt, std::nullopt, {}}};
  const ValidationReport r = validate_entry(e, p);
  EXPECT_FALSE(r.ok);
  std::set<std::string> paths;
  for (const auto& i : r.issues) paths.insert(i.path);
  EXPECT_TRUE(paths.count("headword"));
  EXPECT_TRUE(paths.count("senses/0/sense_no"));
  EXPECT_TRUE(paths.count("senses/0"));
}

TEST(Model, UnknownPosIsOnlyAWarning) {
  testsupport::Rng rng(2);
  const Project p = testsupport::test_project();
  LexicalEntry e = testsupport::random_entry(rng, p.id);
  e.pos = "clf";
  const ValidationReport r = validate_entry(e, p);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.count(Severity::Warning), 1u);
}

TEST(Model, UtteranceMustRejoinPhrase) {
  testsupport::Rng rng(3);
  Utterance u = testsupport::random_utterance(rng);
  EXPECT_TRUE(validate_utterance(u).ok);
  u.phrase += " extra";
  EXPECT_FALSE(validate_utterance(u).ok);
}

TEST(Model, GlossedWordsNeedGlossedMorphs) {
  Utterance u;
  u.id = new_id();
  u.phrase = "vitabu";
  u.glossed = true;
  u.words = {Word{"vitabu", {Morph{"vi-", "PL", MorphType::Prefix}, Morph{"tabu", "", MorphType::Root}}, {}}};
  const ValidationReport r = validate_utterance(u);
  EXPECT_FALSE(r.ok);
  std::set<std::string> paths;
  for (const auto& i : r.issues) paths.insert(i.path);
  EXPECT_TRUE(paths.count("words/0/morphs/0/form"));
  EXPECT_TRUE(paths.count("words/0/morphs/1/gloss"));
}

TEST(Model, ProjectNeedsOwner) {
  Project p = testsupport::test_project();
  EXPECT_TRUE(validate_project(p).ok);
  p.members.begin()->second = Role::Editor;
  EXPECT_FALSE(validate_project(p).ok);
  p = testsupport::test_project();
  p.alphabet.push_back("a");
  EXPECT_FALSE(validate_project(p).ok);
}
