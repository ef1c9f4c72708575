#include "patmine/embeddings.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "patmine/error.hpp"
#include "patmine/rng.hpp"

namespace patmine {

EmbeddingTable load_embeddings(const std::string& path,
                               const std::vector<std::string>& words,
                               int dim, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);

  std::unordered_map<std::string, Index> wanted;
  for (std::size_t i = 0; i < words.size(); ++i) {
    wanted[words[i]] = static_cast<Index>(i) + 1;
  }

  EmbeddingTable table;
  Rng rng(seed);
  table.vectors.resize(static_cast<Index>(words.size()) + 1, dim);
  for (Index i = 0; i < table.vectors.rows(); ++i) {
    for (Index j = 0; j < dim; ++j) table.vectors(i, j) = normal01(rng) * 0.1;
  }

  std::string line;
  std::size_t lineno = 0;
  std::size_t found = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream iss(line);
    std::string word;
    iss >> word;
    if (first) {
      first = false;
      // Optional "count dim" header.
      std::string second;
      if (iss >> second) {
        char* end = nullptr;
        const long a = std::strtol(word.c_str(), &end, 10);
        const bool word_numeric = end != nullptr && *end == '\0';
        char* end2 = nullptr;
        const long b = std::strtol(second.c_str(), &end2, 10);
        const bool second_numeric = end2 != nullptr && *end2 == '\0';
        std::string rest;
        if (word_numeric && second_numeric && !(iss >> rest)) {
          if (b != dim) {
            throw DataError(path + ": vector dimension " + std::to_string(b) +
                            " does not match configured " +
                            std::to_string(dim));
          }
          (void)a;
          continue;
        }
      }
      iss.clear();
      iss.str(line);
      iss >> word;
    }
    std::vector<Real> values;
    Real v;
    while (iss >> v) values.push_back(v);
    if (static_cast<int>(values.size()) != dim) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": vector dimension " + std::to_string(values.size()) +
                      " does not match configured " + std::to_string(dim));
    }
    const auto it = wanted.find(word);
    if (it == wanted.end()) continue;
    for (int j = 0; j < dim; ++j) table.vectors(it->second, j) = values[j];
    ++found;
    wanted.erase(it);
  }
  table.coverage = words.empty()
                       ? Real(0)
                       : static_cast<Real>(found) / static_cast<Real>(words.size());
  return table;
}

}  // namespace patmine
