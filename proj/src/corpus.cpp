#include "patmine/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

#include "patmine/error.hpp"
#include "patmine/io_util.hpp"

namespace patmine {
namespace {

// ---- UTF-8 / character classes ------------------------------------------

std::vector<char32_t> decode_utf8(const std::string& s) {
  std::vector<char32_t> cps;
  cps.reserve(s.size());
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const unsigned char b = static_cast<unsigned char>(s[i]);
    char32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (b < 0x80) {
      cp = b;
    } else if ((b >> 5) == 0x6 && i + 1 < n) {
      cp = (char32_t(b & 0x1F) << 6) | (s[i + 1] & 0x3F);
      len = 2;
    } else if ((b >> 4) == 0xE && i + 2 < n) {
      cp = (char32_t(b & 0x0F) << 12) | (char32_t(s[i + 1] & 0x3F) << 6) |
           (s[i + 2] & 0x3F);
      len = 3;
    } else if ((b >> 3) == 0x1E && i + 3 < n) {
      cp = (char32_t(b & 0x07) << 18) | (char32_t(s[i + 1] & 0x3F) << 12) |
           (char32_t(s[i + 2] & 0x3F) << 6) | (s[i + 3] & 0x3F);
      len = 4;
    }
    cps.push_back(cp);
    i += len;
  }
  return cps;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::string encode_utf8(const std::vector<char32_t>& cps, std::size_t begin,
                        std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) append_utf8(out, cps[i]);
  return out;
}

bool is_digit_cp(char32_t c) { return c >= '0' && c <= '9'; }

bool is_letter_cp(char32_t c) {
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return true;
  if (c >= 0xC0 && c <= 0x24F && c != 0xD7 && c != 0xF7) return true;  // Latin
  if (c >= 0x370 && c <= 0x3FF) return true;                           // Greek
  return false;
}

bool is_alnum_cp(char32_t c) { return is_digit_cp(c) || is_letter_cp(c); }

bool is_space_cp(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v' || c == 0xA0 || c == 0x2009 || c == 0x202F;
}

char32_t lower_cp(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 0x20;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;      // Latin-1
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;   // Greek
  return c;
}

int opener_of(char32_t c) {
  switch (c) {
    case ')': return '(';
    case ']': return '[';
    case '}': return '{';
    default: return 0;
  }
}

bool is_opener(char32_t c) { return c == '(' || c == '[' || c == '{'; }
bool is_closer(char32_t c) { return c == ')' || c == ']' || c == '}'; }

bool brackets_balanced(const std::vector<char32_t>& cps, std::size_t begin,
                       std::size_t end) {
  std::vector<char32_t> stack;
  for (std::size_t i = begin; i < end; ++i) {
    const char32_t c = cps[i];
    if (is_opener(c)) {
      stack.push_back(c);
    } else if (is_closer(c)) {
      if (stack.empty() || stack.back() != char32_t(opener_of(c))) return false;
      stack.pop_back();
    }
  }
  return stack.empty();
}

int bracket_surplus(const std::vector<char32_t>& cps, std::size_t begin,
                    std::size_t end, char32_t open, char32_t close) {
  int surplus = 0;
  for (std::size_t i = begin; i < end; ++i) {
    if (cps[i] == open) ++surplus;
    if (cps[i] == close) --surplus;
  }
  return surplus;
}

bool is_edge_punct(char32_t c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' ||
         c == '?' || c == '"' || c == '\'' || c == 0x2018 || c == 0x2019 ||
         c == 0x201C || c == 0x201D || c == 0xAB || c == 0xBB;
}

// Alphanumerics plus the interior punctuation seen in chemical names.
bool is_chemical_like(const std::vector<char32_t>& cps, std::size_t begin,
                      std::size_t end) {
  if (begin >= end) return false;
  if (!is_alnum_cp(cps[begin]) || !is_alnum_cp(cps[end - 1])) return false;
  bool has_alnum = false;
  for (std::size_t i = begin; i < end; ++i) {
    const char32_t c = cps[i];
    if (is_alnum_cp(c)) {
      has_alnum = true;
      continue;
    }
    if (c == '-' || c == ',' || c == '\'' || c == '+' || c == '=' ||
        is_opener(c) || is_closer(c)) {
      continue;
    }
    return false;
  }
  return has_alnum && brackets_balanced(cps, begin, end);
}

void split_runs(const std::vector<char32_t>& cps, std::size_t begin,
                std::size_t end, std::vector<std::string>& out) {
  std::string cur;
  const auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  for (std::size_t i = begin; i < end; ++i) {
    const char32_t c = cps[i];
    const bool has_prev = i > begin;
    const bool has_next = i + 1 < end;
    const char32_t prev = has_prev ? cps[i - 1] : 0;
    const char32_t next = has_next ? cps[i + 1] : 0;
    if (is_alnum_cp(c)) {
      append_utf8(cur, c);
    } else if ((c == '-' || c == '\'') && has_prev && is_alnum_cp(prev) &&
               has_next && is_alnum_cp(next)) {
      append_utf8(cur, c);
    } else if ((c == '.' || c == ',' || c == '/') && has_prev &&
               is_digit_cp(prev) && has_next && is_digit_cp(next)) {
      append_utf8(cur, c);
    } else if (c == '%' && has_prev && is_digit_cp(prev) &&
               (!has_next || !is_alnum_cp(next))) {
      append_utf8(cur, c);
    } else if (c < 0x80) {
      // ASCII punctuation stands alone.
      flush();
      out.emplace_back(1, static_cast<char>(c));
    } else {
      // Non-ASCII symbols attach to following letters ("°C", "µm").
      flush();
      append_utf8(cur, c);
    }
  }
  flush();
}

void tokenize_chunk(const std::vector<char32_t>& cps, std::size_t begin,
                    std::size_t end, std::vector<std::string>& out) {
  std::vector<std::string> lead, trail;
  // Peel trailing punctuation and unmatched brackets.
  while (end > begin) {
    const char32_t c = cps[end - 1];
    if (is_edge_punct(c)) {
      trail.emplace_back();
      append_utf8(trail.back(), c);
      --end;
    } else if (is_closer(c) &&
               bracket_surplus(cps, begin, end, opener_of(c), c) < 0) {
      trail.emplace_back();
      append_utf8(trail.back(), c);
      --end;
    } else if (is_opener(c)) {
      trail.emplace_back();
      append_utf8(trail.back(), c);
      --end;
    } else {
      break;
    }
  }
  // Peel leading punctuation and unmatched brackets.
  while (begin < end) {
    const char32_t c = cps[begin];
    const bool numeric_dot =
        c == '.' && begin + 1 < end && is_digit_cp(cps[begin + 1]);
    if (is_edge_punct(c) && !numeric_dot) {
      lead.emplace_back();
      append_utf8(lead.back(), c);
      ++begin;
    } else if (is_opener(c) &&
               bracket_surplus(cps, begin, end, c,
                               c == '(' ? ')' : (c == '[' ? ']' : '}')) > 0) {
      lead.emplace_back();
      append_utf8(lead.back(), c);
      ++begin;
    } else if (is_closer(c)) {
      lead.emplace_back();
      append_utf8(lead.back(), c);
      ++begin;
    } else {
      break;
    }
  }
  for (auto& t : lead) out.push_back(std::move(t));
  if (begin < end) {
    if (is_chemical_like(cps, begin, end)) {
      out.push_back(encode_utf8(cps, begin, end));
    } else {
      split_runs(cps, begin, end, out);
    }
  }
  for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
    out.push_back(std::move(*it));
  }
}

// ---- heading detection ----------------------------------------------------

std::vector<std::string> whitespace_tokens(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream iss(line);
  std::string t;
  while (iss >> t) toks.push_back(t);
  return toks;
}

bool all_letters_upper(const std::string& s) {
  const auto cps = decode_utf8(s);
  bool has_letter = false;
  for (const char32_t c : cps) {
    if (!is_letter_cp(c)) continue;
    has_letter = true;
    if (lower_cp(c) == c) return false;
  }
  return has_letter;
}

bool is_ordinal_token(const std::string& s) {
  std::size_t end = s.size();
  while (end > 0 && (s[end - 1] == '.' || s[end - 1] == ')' || s[end - 1] == ':')) {
    --end;
  }
  if (end == 0) return false;
  bool all_digits = true, all_roman = true;
  for (std::size_t i = 0; i < end; ++i) {
    const char c = s[i];
    if (!std::isdigit(static_cast<unsigned char>(c))) all_digits = false;
    if (std::string("IVXLCDM").find(c) == std::string::npos) all_roman = false;
  }
  return all_digits || all_roman;
}

bool title_case_with_ordinal(const std::vector<std::string>& toks) {
  if (toks.size() < 2) return false;
  if (!is_ordinal_token(toks.back())) return false;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    const auto cps = decode_utf8(toks[i]);
    char32_t first_letter = 0;
    for (const char32_t c : cps) {
      if (is_letter_cp(c)) {
        first_letter = c;
        break;
      }
    }
    if (first_letter == 0) continue;  // pure number/punct words pass
    if (lower_cp(first_letter) == first_letter) return false;
  }
  return true;
}

bool has_sentence_period(const std::string& line) {
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    if (line[i] != '.') continue;
    std::size_t j = i + 1;
    bool saw_space = false;
    while (j < line.size() &&
           std::isspace(static_cast<unsigned char>(line[j]))) {
      saw_space = true;
      ++j;
    }
    if (saw_space && j < line.size()) return true;
  }
  return false;
}

struct HeadingMatcher {
  const HeadingConfig& cfg;
  std::vector<std::regex> patterns;

  explicit HeadingMatcher(const HeadingConfig& c) : cfg(c) {
    for (const auto& p : c.patterns) patterns.emplace_back(p);
  }

  bool matches(const std::string& line) const {
    const auto toks = whitespace_tokens(line);
    if (toks.empty() || toks.size() > cfg.max_tokens) return false;
    if (has_sentence_period(line)) return false;
    if (all_letters_upper(line)) return true;
    if (title_case_with_ordinal(toks)) return true;
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    const auto last = trimmed.find_last_not_of(" \t\r");
    trimmed.erase(last == std::string::npos ? 0 : last + 1);
    for (const auto& re : patterns) {
      if (std::regex_match(trimmed, re)) return true;
    }
    return false;
  }
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool suffix_is(const std::string& s, const char* suf) {
  const std::size_t n = std::strlen(suf);
  return s.size() >= n && s.compare(s.size() - n, n, suf) == 0;
}

bool all_ascii_alpha(const std::string& s) {
  for (const char c : s) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return false;
  }
  return !s.empty();
}

bool is_consonant(char c) {
  return c != 'a' && c != 'e' && c != 'i' && c != 'o' && c != 'u';
}

// Drop the second of a doubled final consonant ("stirr" -> "stir").
void undouble(std::string& s) {
  const std::size_t n = s.size();
  if (n < 2) return;
  const char c = s[n - 1];
  if (c == s[n - 2] && is_consonant(c) && c != 'l' && c != 's' && c != 'z') {
    s.pop_back();
  }
}

// One pass of the fallback suffix rules; returns true on change.
bool suffix_step(std::string& s) {
  if (s.size() < 4) return false;
  if (suffix_is(s, "ies") && s.size() >= 5) {
    s.replace(s.size() - 3, 3, "y");
    return true;
  }
  if (suffix_is(s, "ied") && s.size() >= 5) {
    s.replace(s.size() - 3, 3, "y");
    return true;
  }
  if (suffix_is(s, "sses")) {
    s.erase(s.size() - 2);
    return true;
  }
  if (suffix_is(s, "ches") || suffix_is(s, "shes") || suffix_is(s, "xes") ||
      suffix_is(s, "zes") || suffix_is(s, "oes")) {
    s.erase(s.size() - 2);
    return true;
  }
  if (suffix_is(s, "ss") || suffix_is(s, "us") || suffix_is(s, "is")) {
    // fall through to -ed/-ing below
  } else if (s.back() == 's' && s.size() >= 4) {
    s.pop_back();
    return true;
  }
  if (suffix_is(s, "ing") && s.size() >= 6) {
    std::string stem = s.substr(0, s.size() - 3);
    undouble(stem);
    if (stem.size() >= 3) {
      s = stem;
      return true;
    }
  }
  if (suffix_is(s, "ed") && s.size() >= 5) {
    std::string stem = s.substr(0, s.size() - 2);
    if (stem.back() != 'e') {
      undouble(stem);
      if (stem.size() >= 3) {
        s = stem;
        return true;
      }
    }
  }
  return false;
}

}  // namespace

// ---- public API -----------------------------------------------------------

NormResources NormResources::load(const std::string& stopword_path,
                                  const std::string& lemma_path) {
  NormResources res;
  for (const auto& line : read_lines(stopword_path)) {
    const std::string w = trim(line);
    if (w.empty() || w[0] == '#') continue;
    res.stopwords.insert(w);
  }
  std::size_t lineno = 0;
  for (const auto& line : read_lines(lemma_path)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tab(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw DataError(lemma_path + ":" + std::to_string(lineno) +
                      ": expected surface<TAB>lemma");
    }
    res.lemmas[fields[0]] = fields[1];
  }
  return res;
}

bool is_heading_line(const std::string& line, const HeadingConfig& cfg) {
  return HeadingMatcher(cfg).matches(line);
}

std::vector<Section> segment_sections(const RawDocument& doc,
                                      const HeadingConfig& cfg) {
  std::vector<Section> sections;
  if (doc.body.empty()) return sections;
  const HeadingMatcher matcher(cfg);

  std::vector<std::string> lines;
  {
    std::string cur;
    for (const char c : doc.body) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    lines.push_back(cur);
  }

  std::string heading;
  std::string body;
  bool open = false;  // a heading was seen for the current section
  std::size_t ordinal = 0;

  const auto close_section = [&] {
    const std::string trimmed = trim(body);
    if (open || !trimmed.empty()) {
      Section s;
      s.section_id = doc.doc_id + "#" + std::to_string(ordinal++);
      s.heading = heading;
      s.body = trimmed;
      sections.push_back(std::move(s));
    }
    heading.clear();
    body.clear();
  };

  for (const auto& line : lines) {
    if (matcher.matches(line)) {
      close_section();
      heading = trim(line);
      open = true;
    } else {
      body += line;
      body += '\n';
    }
  }
  close_section();
  return sections;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  const auto cps = decode_utf8(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_space_cp(cps[i])) ++i;
    std::size_t j = i;
    while (j < cps.size() && !is_space_cp(cps[j])) ++j;
    if (j > i) tokenize_chunk(cps, i, j, out);
    i = j;
  }
  return out;
}

bool is_numeric_token(const std::string& token) {
  std::size_t i = 0;
  const std::size_t n = token.size();
  if (i < n && (token[i] == '+' || token[i] == '-')) ++i;
  if (i < n && token[i] == '.') ++i;  // ".5"
  bool seen_digit = false;
  for (;;) {
    std::size_t start = i;
    while (i < n && std::isdigit(static_cast<unsigned char>(token[i]))) ++i;
    if (i == start) return false;
    seen_digit = true;
    if (i < n && (token[i] == '.' || token[i] == ',' || token[i] == '/') &&
        i + 1 < n && std::isdigit(static_cast<unsigned char>(token[i + 1]))) {
      ++i;
      continue;
    }
    break;
  }
  if (i < n && token[i] == '%') ++i;
  return seen_digit && i == n;
}

std::string lemmatize(const std::string& lower_token,
                      const NormResources& resources) {
  const auto it = resources.lemmas.find(lower_token);
  if (it != resources.lemmas.end()) return it->second;
  if (!all_ascii_alpha(lower_token)) return lower_token;
  std::string s = lower_token;
  // Iterate to a fixpoint so derived and base forms lemmatize identically.
  for (int pass = 0; pass < 8 && suffix_step(s); ++pass) {
  }
  return s;
}

std::vector<std::string> normalize(const std::vector<std::string>& tokens,
                                   const NormResources& resources) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    if (tok == kNumberSentinel) {
      out.push_back(kNumberSentinel);
      continue;
    }
    const auto cps = decode_utf8(tok);
    bool has_alnum = false;
    for (const char32_t c : cps) {
      if (is_alnum_cp(c)) {
        has_alnum = true;
        break;
      }
    }
    if (!has_alnum) continue;  // punctuation-only
    if (is_numeric_token(tok)) {
      out.push_back(kNumberSentinel);
      continue;
    }
    std::string lower;
    for (const char32_t c : cps) append_utf8(lower, lower_cp(c));
    if (resources.stopwords.count(lower)) continue;
    std::string lemma = lemmatize(lower, resources);
    if (resources.stopwords.count(lemma)) continue;
    out.push_back(std::move(lemma));
  }
  return out;
}

bool all_letters(const std::string& token) {
  const auto cps = decode_utf8(token);
  if (cps.empty()) return false;
  for (const char32_t c : cps) {
    if (!is_letter_cp(c)) return false;
  }
  return true;
}

std::size_t utf8_length(const std::string& s) {
  std::size_t n = 0;
  for (const char c : s) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::vector<char32_t> utf8_codepoints(const std::string& s) {
  return decode_utf8(s);
}

std::vector<std::string> split_sentences(const std::string& text) {
  static const std::unordered_set<std::string> kAbbrev = {
      "e.g", "i.e", "etc", "fig", "figs", "no",  "nos", "vs",  "approx",
      "ca",  "mr",  "dr",  "st",  "inc",  "co",  "eq",  "eqs", "ref",
      "refs", "al",  "wt",  "vol", "temp", "min", "max", "cf"};
  std::vector<std::string> sentences;
  std::string cur;
  int depth = 0;
  const std::size_t n = text.size();
  const auto flush = [&] {
    const std::string s = trim(cur);
    if (!s.empty()) sentences.push_back(s);
    cur.clear();
  };
  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') depth = std::max(0, depth - 1);
    if (c == '\n') {
      flush();
      continue;
    }
    cur += c;
    if (depth > 0) continue;
    if (c != '.' && c != ';' && c != '!' && c != '?') continue;
    // Boundary only before whitespace + capital/digit.
    std::size_t j = i + 1;
    bool saw_space = false;
    while (j < n && (text[j] == ' ' || text[j] == '\t')) {
      saw_space = true;
      ++j;
    }
    if (!saw_space || j >= n) continue;
    const unsigned char next = static_cast<unsigned char>(text[j]);
    if (!(std::isupper(next) || std::isdigit(next))) continue;
    if (c == '.') {
      // Abbreviation guard on the word preceding the period.
      std::size_t w = cur.size() - 1;  // index of '.'
      std::size_t start = w;
      while (start > 0 &&
             (std::isalpha(static_cast<unsigned char>(cur[start - 1])) ||
              cur[start - 1] == '.')) {
        --start;
      }
      std::string word = cur.substr(start, w - start);
      std::transform(word.begin(), word.end(), word.begin(),
                     [](unsigned char ch) { return std::tolower(ch); });
      if (kAbbrev.count(word)) continue;
      if (word.size() == 1) continue;  // initials such as "D. Smith"
    }
    flush();
  }
  flush();
  return sentences;
}

}  // namespace patmine
