#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "patmine/corpus.hpp"
#include "patmine/error.hpp"
#include "patmine/rng.hpp"
#include "patmine/types.hpp"

namespace patmine {

struct VocabCriteria {
  std::size_t min_doc_freq = 200;
  double max_doc_fraction = 0.70;
  std::size_t min_chars = 3;  // counted in codepoints
};

struct Vocabulary {
  std::vector<std::string> terms;  // lexicographic; index = position
  std::unordered_map<std::string, Index> index;
  std::vector<std::size_t> doc_freq;  // aligned with terms

  Index size() const { return static_cast<Index>(terms.size()); }
  Index lookup(const std::string& term) const {
    const auto it = index.find(term);
    return it == index.end() ? -1 : it->second;
  }
  std::uint64_t hash() const;

  void save_tsv(const std::string& path) const;
  static Vocabulary load_tsv(const std::string& path);
};

struct TruncationPolicy {
  Real q1 = 0;
  Real q3 = 0;
  Real q_trunc = 0;  // q3 + 1.5 * (q3 - q1)
};

struct BowVector {
  std::string section_id;
  std::map<Index, int> counts;  // sparse, strictly positive
  long total = 0;               // sum of counts
};

// q1/q3 are the 25th/75th percentiles with linear interpolation between
// order statistics; the cutoff follows the IQR outlier rule.
TruncationPolicy compute_truncation(const std::vector<std::size_t>& lengths);

// A term enters iff doc_freq >= min_doc_freq, doc_freq <= max_doc_fraction*N,
// codepoint length >= min_chars, and it contains neither digits nor
// punctuation.  Term order is lexicographic.
Vocabulary build_vocabulary(const std::vector<TokenizedSection>& sections,
                            const VocabCriteria& criteria);

// Tokens past floor(q_trunc) are discarded before counting; OOV tokens skip.
BowVector vectorize(const TokenizedSection& section, const Vocabulary& vocab,
                    const TruncationPolicy* policy);

void save_bow_jsonl(const std::string& path,
                    const std::vector<BowVector>& bows);
std::vector<BowVector> load_bow_jsonl(const std::string& path);

// Deterministic seeded permutation, then floor-then-remainder allocation:
// part i gets floor(f_i * n); leftovers go one each to the parts with the
// largest fractional share, ties resolved toward the higher index.
std::vector<std::size_t> split_sizes(std::size_t n,
                                     const std::vector<double>& fractions);

template <class T>
std::vector<std::vector<T>> split_shuffle(std::vector<T> items,
                                          const std::vector<double>& fractions,
                                          std::uint64_t seed) {
  const auto sizes = split_sizes(items.size(), fractions);
  Rng rng(seed);
  fisher_yates(items, rng);
  std::vector<std::vector<T>> parts(fractions.size());
  std::size_t pos = 0;
  for (std::size_t p = 0; p < sizes.size(); ++p) {
    parts[p].assign(items.begin() + pos, items.begin() + pos + sizes[p]);
    pos += sizes[p];
  }
  return parts;
}

}  // namespace patmine
