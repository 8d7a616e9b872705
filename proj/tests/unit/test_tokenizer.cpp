#include <gtest/gtest.h>

#include "optrend/tokenizer.hpp"

using namespace optrend;

namespace {

std::vector<std::pair<TokenKind, std::string>> kinds(std::string_view text) {
  std::vector<std::pair<TokenKind, std::string>> out;
  for (const auto& t : tokenize(text)) out.emplace_back(t.kind, t.text);
  return out;
}

using K = TokenKind;

}  // namespace

TEST(Tokenizer, SegmentsTheFiveKinds) {
  const auto t = kinds("RT @JohnDoe: Vote NOW! #ImWithHer https://t.co/AbC. :)");
  const std::vector<std::pair<TokenKind, std::string>> want = {
      {K::word, "rt"},       {K::username, "johndoe"},           {K::word, "vote"}, {K::word, "now"},
      {K::hashtag, "imwithher"}, {K::url, "https://t.co/AbC"}, {K::emoticon, ":)"}};
  EXPECT_EQ(t, want);
}

TEST(Tokenizer, ApostrophesStayInsideWords) {
  EXPECT_EQ(kinds("I'm sure they don't 'know'"),
            (std::vector<std::pair<TokenKind, std::string>>{
                {K::word, "i'm"}, {K::word, "sure"}, {K::word, "they"}, {K::word, "don't"}, {K::word, "know"}}));
  EXPECT_EQ(tokenize("it\xE2\x80\x99s")[0].text, "it\xE2\x80\x99s");
}

TEST(Tokenizer, EmoticonsOnlyAsWholeChunks) {
  // "(:" inside a word-level chunk is punctuation, not an emoticon.
  EXPECT_EQ(kinds("ok:)"), (std::vector<std::pair<TokenKind, std::string>>{{K::word, "ok"}}));
  EXPECT_EQ(kinds(":( sad"),
            (std::vector<std::pair<TokenKind, std::string>>{{K::emoticon, ":("}, {K::word, "sad"}}));
  EXPECT_EQ(kinds("<3"), (std::vector<std::pair<TokenKind, std::string>>{{K::emoticon, "<3"}}));
}

TEST(Tokenizer, EmojiAreEmoticonTokens) {
  const auto t = tokenize("great\xF0\x9F\x98\x80 \xE2\x9D\xA4\xEF\xB8\x8F");  // grinning face, heart + VS16
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].text, "great");
  EXPECT_EQ(t[1].kind, K::emoticon);
  EXPECT_EQ(emoticon_polarity(t[1]), Polarity::positive);
  EXPECT_EQ(t[2].kind, K::emoticon);
  EXPECT_EQ(t[2].text, "\xE2\x9D\xA4");
}

TEST(Tokenizer, EmoticonPolarity) {
  EXPECT_EQ(emoticon_polarity(tokenize(":-(")[0]), Polarity::negative);
  EXPECT_EQ(emoticon_polarity(tokenize("XD")[0]), Polarity::positive);
  EXPECT_EQ(emoticon_polarity(tokenize(":|")[0]), Polarity::none);
  EXPECT_EQ(emoticon_polarity(tokenize("\xF0\x9F\x98\xA0")[0]), Polarity::negative);  // angry face
  EXPECT_EQ(emoticon_polarity(tokenize("word")[0]), Polarity::none);
}

TEST(Tokenizer, SigilsNeedAWordCharacter) {
  EXPECT_EQ(kinds("# @ #1 a@b"),
            (std::vector<std::pair<TokenKind, std::string>>{{K::hashtag, "1"}, {K::word, "a"}, {K::username, "b"}}));
}

TEST(Tokenizer, FeatureSpellingsStayDistinct) {
  const auto t = tokenize("trump #trump @trump");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].feature(), "trump");
  EXPECT_EQ(t[1].feature(), "#trump");
  EXPECT_EQ(t[2].feature(), "@trump");
}

TEST(Tokenizer, SurvivesMalformedUtf8) {
  const std::string bad = "ok \xC3 \xFF\xFE end \xE2\x82";
  const auto t = tokenize(bad);
  ASSERT_GE(t.size(), 2u);
  EXPECT_EQ(t.front().text, "ok");
  bool has_end = false;
  for (const auto& x : t) has_end |= x.text == "end";
  EXPECT_TRUE(has_end);
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize("   \t\n").empty());
}

TEST(Tokenizer, WwwUrlsAndTrailingPunctuation) {
  EXPECT_EQ(kinds("see www.Example.com/x?, now"),
            (std::vector<std::pair<TokenKind, std::string>>{
                {K::word, "see"}, {K::url, "www.Example.com/x"}, {K::word, "now"}}));
}
