#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patmine/types.hpp"

namespace patmine {

struct EmbeddingTable {
  Matrix vectors;   // (words.size() + 1) x dim; row 0 is the OOV row
  Real coverage = 0;  // fraction of words found in the file
};

// Text format "word v1 ... vdim", with an optional "count dim" header line.
// Rows for words absent from the file (and the OOV row) are drawn from
// N(0, 0.1^2) with the given seed.  A dimension mismatch is an error.
EmbeddingTable load_embeddings(const std::string& path,
                               const std::vector<std::string>& words,
                               int dim, std::uint64_t seed);

}  // namespace patmine
