#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace optrend {

enum class TokenKind { word, hashtag, username, emoticon, url };

inline const char* to_string(TokenKind k) {
  switch (k) {
    case TokenKind::word: return "word";
    case TokenKind::hashtag: return "hashtag";
    case TokenKind::username: return "username";
    case TokenKind::emoticon: return "emoticon";
    case TokenKind::url: return "url";
  }
  return "?";
}

struct Token {
  TokenKind kind = TokenKind::word;
  std::string text;  // sigil-stripped; lowercase except urls and emoticons

  bool operator==(const Token&) const = default;

  // Feature spelling: sigils keep hashtags and usernames distinct from words.
  std::string feature() const {
    switch (kind) {
      case TokenKind::hashtag: return "#" + text;
      case TokenKind::username: return "@" + text;
      default: return text;
    }
  }
};

using TokenStream = std::vector<Token>;

enum class Polarity { none, positive, negative };

// ASCII emoticon inventory. Matched only as whole whitespace-delimited tokens.
struct EmoticonEntry {
  std::string_view text;
  Polarity polarity;
};

inline constexpr std::array<EmoticonEntry, 32> kAsciiEmoticons{{
    {":)", Polarity::positive},  {":-)", Polarity::positive}, {":]", Polarity::positive},
    {"=)", Polarity::positive},  {":D", Polarity::positive},  {":-D", Polarity::positive},
    {"xD", Polarity::positive},  {"XD", Polarity::positive},  {";)", Polarity::positive},
    {";-)", Polarity::positive}, {":p", Polarity::positive},  {":P", Polarity::positive},
    {":-P", Polarity::positive}, {"<3", Polarity::positive},  {"(:", Polarity::positive},
    {"^_^", Polarity::positive}, {":(", Polarity::negative},  {":-(", Polarity::negative},
    {":[", Polarity::negative},  {"=(", Polarity::negative},  {":'(", Polarity::negative},
    {"D:", Polarity::negative},  {":/", Polarity::negative},  {":-/", Polarity::negative},
    {":\\", Polarity::negative}, {">:(", Polarity::negative}, {"):", Polarity::negative},
    {"</3", Polarity::negative}, {":|", Polarity::none},      {":-|", Polarity::none},
    {":o", Polarity::none},      {":O", Polarity::none},
}};

// Emoji blocks recognized as emoticon tokens.
inline bool is_emoji(char32_t cp) {
  return (cp >= 0x1F300 && cp <= 0x1F5FF) || (cp >= 0x1F600 && cp <= 0x1F64F) ||
         (cp >= 0x1F680 && cp <= 0x1F6FF) || (cp >= 0x1F900 && cp <= 0x1F9FF) ||
         (cp >= 0x1FA70 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF);
}

// Emoji with a documented polarity; all other emoji are neutral.
inline Polarity emoji_polarity(char32_t cp) {
  static constexpr char32_t kPositive[] = {0x1F600, 0x1F601, 0x1F602, 0x1F603, 0x1F604, 0x1F606, 0x1F60A,
                                           0x1F60D, 0x1F618, 0x1F970, 0x1F973, 0x1F44D, 0x1F44F, 0x1F389,
                                           0x2764,  0x1F495, 0x1F496, 0x263A,  0x1F642, 0x1F60E};
  static constexpr char32_t kNegative[] = {0x1F620, 0x1F621, 0x1F622, 0x1F62D, 0x1F61E, 0x1F61F, 0x1F623,
                                           0x1F624, 0x1F625, 0x1F629, 0x1F62B, 0x1F44E, 0x1F494, 0x1F612,
                                           0x1F615, 0x1F641, 0x2639,  0x1F92C, 0x1F92E, 0x1F4A9};
  if (std::find(std::begin(kPositive), std::end(kPositive), cp) != std::end(kPositive)) return Polarity::positive;
  if (std::find(std::begin(kNegative), std::end(kNegative), cp) != std::end(kNegative)) return Polarity::negative;
  return Polarity::none;
}

namespace detail {

struct Utf8Char {
  char32_t cp;
  std::size_t len;
};

// Decodes one code point; invalid bytes decode as U+FFFD of length 1.
inline Utf8Char decode_utf8(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) {
    return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  auto cb = [&](std::size_t k) { return static_cast<char32_t>(static_cast<unsigned char>(s[i + k]) & 0x3F); };
  if (b0 < 0x80) return {b0, 1};
  if ((b0 & 0xE0) == 0xC0 && cont(1)) return {(static_cast<char32_t>(b0 & 0x1F) << 6) | cb(1), 2};
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2))
    return {(static_cast<char32_t>(b0 & 0x0F) << 12) | (cb(1) << 6) | cb(2), 3};
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3))
    return {(static_cast<char32_t>(b0 & 0x07) << 18) | (cb(1) << 12) | (cb(2) << 6) | cb(3), 4};
  return {0xFFFD, 1};
}

inline bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == 0xA0 || c == 0x3000 ||
         (c >= 0x2000 && c <= 0x200B);
}

// Word characters: ASCII alphanumerics, underscore, and any non-ASCII letter-like code
// point that is not an emoji, space, or general punctuation.
inline bool is_word_char(char32_t c) {
  if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  if (is_space(c) || is_emoji(c) || c == 0xFE0F || c == 0x200D || c == 0xFFFD) return false;
  if (c >= 0x2010 && c <= 0x206F) return false;  // general punctuation
  if (c >= 0x3000 && c <= 0x303F) return false;  // CJK punctuation
  return true;
}

inline bool is_apostrophe(char32_t c) { return c == '\'' || c == 0x2019; }

inline std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

}  // namespace detail

// Segments a tweet into words, hashtags, usernames, emoticons and urls. Urls are kept
// verbatim; other punctuation is dropped.
inline TokenStream tokenize(std::string_view text) {
  TokenStream out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto at_chunk_start = [&](std::size_t pos) {
    if (pos == 0) return true;
    std::size_t p = pos - 1;
    while (p > 0 && (static_cast<unsigned char>(text[p]) & 0xC0) == 0x80) --p;
    return detail::is_space(detail::decode_utf8(text, p).cp);
  };
  auto chunk_end = [&](std::size_t pos) {
    while (pos < n) {
      auto ch = detail::decode_utf8(text, pos);
      if (detail::is_space(ch.cp)) break;
      pos += ch.len;
    }
    return pos;
  };
  while (i < n) {
    const auto ch = detail::decode_utf8(text, i);
    if (detail::is_space(ch.cp)) {
      i += ch.len;
      continue;
    }
    const std::string_view rest = text.substr(i);
    // Urls run to the next whitespace.
    if (rest.rfind("http://", 0) == 0 || rest.rfind("https://", 0) == 0 || rest.rfind("www.", 0) == 0) {
      std::size_t end = chunk_end(i);
      std::string_view url = text.substr(i, end - i);
      while (!url.empty() && (url.back() == '.' || url.back() == ',' || url.back() == ')' || url.back() == '!' ||
                              url.back() == '?' || url.back() == ';' || url.back() == '"'))
        url.remove_suffix(1);
      out.push_back({TokenKind::url, std::string(url)});
      i = end;
      continue;
    }
    // ASCII emoticons must form a whole whitespace-delimited chunk.
    if (at_chunk_start(i)) {
      const std::size_t end = chunk_end(i);
      const std::string_view chunk = text.substr(i, end - i);
      auto it = std::find_if(kAsciiEmoticons.begin(), kAsciiEmoticons.end(),
                             [&](const EmoticonEntry& e) { return e.text == chunk; });
      if (it != kAsciiEmoticons.end()) {
        out.push_back({TokenKind::emoticon, std::string(chunk)});
        i = end;
        continue;
      }
    }
    if (is_emoji(ch.cp)) {
      std::size_t end = i + ch.len;
      // Absorb a variation selector.
      if (end < n) {
        auto nx = detail::decode_utf8(text, end);
        if (nx.cp == 0xFE0F) end += nx.len;
      }
      out.push_back({TokenKind::emoticon, std::string(text.substr(i, ch.len))});
      i = end;
      continue;
    }
    if ((ch.cp == '#' || ch.cp == '@') && i + 1 < n) {
      std::size_t j = i + 1;
      while (j < n) {
        auto c = detail::decode_utf8(text, j);
        if (!detail::is_word_char(c.cp)) break;
        j += c.len;
      }
      if (j > i + 1) {
        out.push_back({ch.cp == '#' ? TokenKind::hashtag : TokenKind::username,
                       detail::lower_ascii(text.substr(i + 1, j - i - 1))});
        i = j;
        continue;
      }
    }
    if (detail::is_word_char(ch.cp)) {
      std::size_t j = i;
      while (j < n) {
        auto c = detail::decode_utf8(text, j);
        if (detail::is_word_char(c.cp)) {
          j += c.len;
          continue;
        }
        // Internal apostrophe followed by a word character (i'm, don't).
        if (detail::is_apostrophe(c.cp) && j + c.len < n &&
            detail::is_word_char(detail::decode_utf8(text, j + c.len).cp)) {
          j += c.len;
          continue;
        }
        break;
      }
      out.push_back({TokenKind::word, detail::lower_ascii(text.substr(i, j - i))});
      i = j;
      continue;
    }
    i += ch.len;  // punctuation
  }
  return out;
}

inline Polarity emoticon_polarity(const Token& t) {
  if (t.kind != TokenKind::emoticon) return Polarity::none;
  for (const auto& e : kAsciiEmoticons)
    if (e.text == t.text) return e.polarity;
  return emoji_polarity(detail::decode_utf8(t.text, 0).cp);
}

}  // namespace optrend
