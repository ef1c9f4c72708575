#include "patmine/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "patmine/io_util.hpp"

namespace patmine {
namespace {

Real percentile(const std::vector<Real>& sorted, Real q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const Real pos = q * static_cast<Real>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const Real frac = pos - static_cast<Real>(lo);
  if (lo + 1 >= n) return sorted[n - 1];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

TruncationPolicy compute_truncation(const std::vector<std::size_t>& lengths) {
  if (lengths.empty()) throw std::invalid_argument("no lengths");
  std::vector<Real> sorted(lengths.begin(), lengths.end());
  std::sort(sorted.begin(), sorted.end());
  TruncationPolicy policy;
  policy.q1 = percentile(sorted, 0.25);
  policy.q3 = percentile(sorted, 0.75);
  policy.q_trunc = policy.q3 + 1.5 * (policy.q3 - policy.q1);
  return policy;
}

Vocabulary build_vocabulary(const std::vector<TokenizedSection>& sections,
                            const VocabCriteria& criteria) {
  std::unordered_map<std::string, std::size_t> doc_freq;
  for (const auto& sec : sections) {
    std::unordered_map<std::string, bool> seen;
    for (const auto& tok : sec.tokens) {
      if (!seen.emplace(tok, true).second) continue;
      ++doc_freq[tok];
    }
  }
  const double max_docs =
      criteria.max_doc_fraction * static_cast<double>(sections.size());
  Vocabulary vocab;
  for (const auto& [term, df] : doc_freq) {
    if (df < criteria.min_doc_freq) continue;
    if (static_cast<double>(df) > max_docs) continue;
    if (utf8_length(term) < criteria.min_chars) continue;
    if (!all_letters(term)) continue;
    vocab.terms.push_back(term);
  }
  std::sort(vocab.terms.begin(), vocab.terms.end());
  vocab.doc_freq.resize(vocab.terms.size());
  for (std::size_t i = 0; i < vocab.terms.size(); ++i) {
    vocab.index[vocab.terms[i]] = static_cast<Index>(i);
    vocab.doc_freq[i] = doc_freq[vocab.terms[i]];
  }
  return vocab;
}

std::uint64_t Vocabulary::hash() const { return hash_strings(terms); }

void Vocabulary::save_tsv(const std::string& path) const {
  std::ostringstream out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    out << terms[i] << '\t' << i << '\t' << doc_freq[i] << '\n';
  }
  write_text(path, out.str());
}

Vocabulary Vocabulary::load_tsv(const std::string& path) {
  Vocabulary vocab;
  std::size_t lineno = 0;
  for (const auto& line : read_lines(path)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_tab(line);
    if (fields.size() != 3) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected term<TAB>index<TAB>doc_freq");
    }
    const std::size_t idx = std::stoul(fields[1]);
    if (idx != vocab.terms.size()) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": vocabulary indices must be dense from 0");
    }
    vocab.terms.push_back(fields[0]);
    vocab.doc_freq.push_back(std::stoul(fields[2]));
    vocab.index[fields[0]] = static_cast<Index>(idx);
  }
  return vocab;
}

BowVector vectorize(const TokenizedSection& section, const Vocabulary& vocab,
                    const TruncationPolicy* policy) {
  BowVector bow;
  bow.section_id = section.section_id;
  std::size_t limit = section.tokens.size();
  if (policy != nullptr) {
    limit = std::min(limit,
                     static_cast<std::size_t>(std::floor(policy->q_trunc)));
  }
  for (std::size_t i = 0; i < limit; ++i) {
    const Index idx = vocab.lookup(section.tokens[i]);
    if (idx < 0) continue;
    ++bow.counts[idx];
    ++bow.total;
  }
  return bow;
}

void save_bow_jsonl(const std::string& path,
                    const std::vector<BowVector>& bows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write: " + path);
  for (const auto& bow : bows) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [idx, n] : bow.counts) {
      counts[std::to_string(idx)] = n;
    }
    nlohmann::json obj{{"section_id", bow.section_id}, {"counts", counts}};
    out << obj.dump() << '\n';
  }
}

std::vector<BowVector> load_bow_jsonl(const std::string& path) {
  std::vector<BowVector> bows;
  for_each_jsonl(path, [&](const nlohmann::json& obj, std::size_t lineno) {
    BowVector bow;
    bow.section_id = obj.at("section_id").get<std::string>();
    for (const auto& [key, value] : obj.at("counts").items()) {
      const int n = value.get<int>();
      if (n <= 0) {
        throw DataError(path + ":" + std::to_string(lineno) +
                        ": counts must be positive");
      }
      bow.counts[static_cast<Index>(std::stoll(key))] = n;
      bow.total += n;
    }
    bows.push_back(std::move(bow));
  });
  return bows;
}

std::vector<std::size_t> split_sizes(std::size_t n,
                                     const std::vector<double>& fractions) {
  double sum = 0;
  for (const double f : fractions) sum += f;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("fractions must sum to 1");
  }
  std::vector<std::size_t> sizes(fractions.size());
  std::vector<std::pair<double, std::size_t>> fracs;  // fractional part, part
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double exact = fractions[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += sizes[i];
    fracs.emplace_back(exact - std::floor(exact), i);
  }
  std::sort(fracs.begin(), fracs.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  });
  for (std::size_t r = 0; assigned < n; ++r, ++assigned) {
    ++sizes[fracs[r % fracs.size()].second];
  }
  return sizes;
}

}  // namespace patmine
