#include "patmine/iob.hpp"

#include <limits>
#include <stdexcept>

namespace patmine {

LabelSet::LabelSet(std::vector<std::string> classes)
    : classes_(std::move(classes)) {
  if (classes_.empty()) throw std::invalid_argument("empty class set");
  names_.reserve(1 + 2 * classes_.size());
  names_.emplace_back("O");
  for (const auto& cls : classes_) {
    names_.push_back("B-" + cls);
    names_.push_back("I-" + cls);
  }
}

LabelSet LabelSet::pharma() {
  return LabelSet({"AMOUNT", "API", "BIOLOGICAL_MATERIAL", "COMPOSITION",
                   "CONDITION", "DOSAGE_FORM", "EQUIPMENT", "EXCIPIENT",
                   "EXCIPIENT_TYPE", "INTERMEDIATES", "OPERATION", "PACKAGING",
                   "REACTANT", "SOLVENT", "TARGET", "YIELD"});
}

int LabelSet::parse_label(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Matrix LabelSet::strict_transition_mask() const {
  const int L = num_labels();
  const Real neg_inf = -std::numeric_limits<Real>::infinity();
  Matrix mask = Matrix::Zero(L + 2, L + 2);
  const int start = L, stop = L + 1;
  for (int to = 0; to < L; ++to) {
    if (!is_inside(to)) continue;
    const int cls = class_of(to);
    for (int from = 0; from < L + 2; ++from) {
      const bool ok = (from == begin_label(cls) || from == inside_label(cls));
      if (!ok) mask(from, to) = neg_inf;
    }
  }
  // Nothing may enter START or leave STOP.
  for (int i = 0; i < L + 2; ++i) {
    mask(i, start) = neg_inf;
    mask(stop, i) = neg_inf;
  }
  return mask;
}

std::vector<EntitySpan> decode_entities(const std::vector<std::string>& tokens,
                                        const std::vector<int>& labels,
                                        const LabelSet& label_set) {
  (void)label_set;  // decoding is structural; the set defines the indices
  if (tokens.size() != labels.size()) {
    throw std::invalid_argument("tokens and labels differ in length");
  }
  std::vector<EntitySpan> spans;
  int open_cls = -1;
  std::size_t open_start = 0;
  const auto close = [&](std::size_t end) {
    if (open_cls < 0) return;
    EntitySpan span;
    span.cls = open_cls;
    span.start = open_start;
    span.end = end;
    for (std::size_t i = open_start; i < end; ++i) {
      if (i > open_start) span.text += ' ';
      span.text += tokens[i];
    }
    spans.push_back(std::move(span));
    open_cls = -1;
  };
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label == LabelSet::o_label()) {
      close(i);
      continue;
    }
    const int cls = LabelSet::class_of(label);
    if (LabelSet::is_begin(label) || cls != open_cls) {
      close(i);
      open_cls = cls;
      open_start = i;
    }
  }
  close(labels.size());
  return spans;
}

}  // namespace patmine
