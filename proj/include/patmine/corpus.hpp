#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace patmine {

struct RawDocument {
  std::string doc_id;
  std::string body;
};

struct Section {
  std::string section_id;  // doc_id "#" ordinal
  std::string heading;     // empty for preamble text
  std::string body;
};

struct TokenizedSection {
  std::string section_id;
  std::vector<std::string> tokens;
  std::size_t raw_len = 0;  // token count before any truncation
};

// A line is a heading iff it has at most `max_tokens` whitespace tokens,
// contains no sentence-final period followed by further text, and is either
// fully upper case, title case with a trailing ordinal, or matches one of
// `patterns` (full match).
struct HeadingConfig {
  std::size_t max_tokens = 12;
  std::vector<std::string> patterns = {"EXAMPLE \\d+", "Step \\d+"};
  bool include_heading_tokens = false;
};

struct NormResources {
  std::unordered_set<std::string> stopwords;
  std::unordered_map<std::string, std::string> lemmas;

  // stopwords: one word per line.  lemmas: TSV "surface<TAB>lemma".
  static NormResources load(const std::string& stopword_path,
                            const std::string& lemma_path);
};

inline const char* kNumberSentinel = "[NUM]";

bool is_heading_line(const std::string& line, const HeadingConfig& cfg);

std::vector<Section> segment_sections(const RawDocument& doc,
                                      const HeadingConfig& cfg);

// Whitespace split followed by punctuation peeling.  Chemical-style tokens
// (alphanumeric runs with interior hyphens and balanced brackets, e.g.
// "4-((2-(dimethoxymethyl)...morpholin-3-one") survive intact.
std::vector<std::string> tokenize(const std::string& text);

// Lowercase, mask numbers as "[NUM]", drop punctuation-only tokens and
// stopwords, lemmatize the rest.  Idempotent.
std::vector<std::string> normalize(const std::vector<std::string>& tokens,
                                   const NormResources& resources);

// Rule-based splitter: sentence end at ./;/!/? followed by whitespace and an
// upper-case letter or digit, with an abbreviation guard; newlines also end
// sentences.  No split inside an open bracket.
std::vector<std::string> split_sentences(const std::string& text);

// True if the token is purely numeric under the masking rule: optional sign,
// digits, optional decimal/percent/ratio punctuation.  "9i" is not a number.
bool is_numeric_token(const std::string& token);

std::string lemmatize(const std::string& lower_token,
                      const NormResources& resources);

// True when every codepoint is a letter; digits and punctuation disqualify.
bool all_letters(const std::string& token);

std::size_t utf8_length(const std::string& s);

std::vector<char32_t> utf8_codepoints(const std::string& s);

}  // namespace patmine
