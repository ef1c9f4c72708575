#pragma once

#include <string>
#include <vector>

#include "patmine/types.hpp"

namespace patmine {

// IOB2 label space over a closed set of entity classes.  Label 0 is "O";
// class c owns labels 1+2c ("B-<class>") and 2+2c ("I-<class>").
class LabelSet {
 public:
  explicit LabelSet(std::vector<std::string> classes);

  // The sixteen manufacturing entity classes of the default corpus.
  static LabelSet pharma();

  int num_classes() const { return static_cast<int>(classes_.size()); }
  int num_labels() const { return 1 + 2 * num_classes(); }

  static constexpr int o_label() { return 0; }
  int begin_label(int cls) const { return 1 + 2 * cls; }
  int inside_label(int cls) const { return 2 + 2 * cls; }
  static bool is_begin(int label) { return label > 0 && label % 2 == 1; }
  static bool is_inside(int label) { return label > 0 && label % 2 == 0; }
  // -1 for O.
  static int class_of(int label) { return label == 0 ? -1 : (label - 1) / 2; }

  const std::string& class_name(int cls) const { return classes_.at(cls); }
  const std::string& label_name(int label) const { return names_.at(label); }
  const std::vector<std::string>& class_names() const { return classes_; }

  // -1 when the string is not a label of this set.
  int parse_label(const std::string& name) const;

  // Transition mask for strict IOB2 decoding: I-X only after B-X or I-X.
  // Rows/cols follow the CRF convention (num_labels + start + stop).
  Matrix strict_transition_mask() const;

 private:
  std::vector<std::string> classes_;
  std::vector<std::string> names_;
};

struct EntitySpan {
  int cls = 0;
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::string text;     // space-joined surface form
};

// Maximal B-X (I-X)* runs become spans; a dangling I-X opens a new span
// (lenient decoding); O breaks spans.
std::vector<EntitySpan> decode_entities(const std::vector<std::string>& tokens,
                                        const std::vector<int>& labels,
                                        const LabelSet& label_set);

}  // namespace patmine
