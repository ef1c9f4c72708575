#pragma once

#include <string>
#include <vector>

#include "patmine/iob.hpp"

namespace patmine {

struct AnnotatedSentence {
  std::vector<std::string> tokens;
  std::vector<int> labels;  // indices into a LabelSet
};

struct AnnotationLoadStats {
  std::size_t repaired_labels = 0;   // I-X openings rewritten to B-X
  std::size_t dropped_short = 0;     // single-token sentences
  std::size_t dropped_duplicates = 0;
};

// Two-column "token<TAB>label" lines, blank line between sentences.  Invalid
// I-X openings are repaired to B-X; single-token sentences and exact
// duplicates are dropped.  Unknown labels raise a DataError with the line
// number.
std::vector<AnnotatedSentence> load_annotations(
    const std::string& path, const LabelSet& label_set,
    AnnotationLoadStats* stats = nullptr);

void save_annotations(const std::string& path,
                      const std::vector<AnnotatedSentence>& sentences,
                      const LabelSet& label_set);

}  // namespace patmine
