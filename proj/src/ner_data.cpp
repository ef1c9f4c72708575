#include "patmine/ner_data.hpp"

#include <sstream>
#include <unordered_set>

#include "patmine/error.hpp"
#include "patmine/io_util.hpp"

namespace patmine {

std::vector<AnnotatedSentence> load_annotations(const std::string& path,
                                                const LabelSet& label_set,
                                                AnnotationLoadStats* stats) {
  AnnotationLoadStats local;
  std::vector<AnnotatedSentence> sentences;
  std::unordered_set<std::string> seen;
  AnnotatedSentence current;

  const auto flush = [&] {
    if (current.tokens.empty()) return;
    if (current.tokens.size() < 2) {
      ++local.dropped_short;
    } else {
      std::string key;
      for (std::size_t i = 0; i < current.tokens.size(); ++i) {
        key += current.tokens[i];
        key += '\x1f';
        key += std::to_string(current.labels[i]);
        key += '\x1e';
      }
      if (seen.insert(key).second) {
        sentences.push_back(current);
      } else {
        ++local.dropped_duplicates;
      }
    }
    current = AnnotatedSentence{};
  };

  std::size_t lineno = 0;
  for (const auto& line : read_lines(path)) {
    ++lineno;
    if (line.empty()) {
      flush();
      continue;
    }
    const auto fields = split_tab(line);
    if (fields.size() != 2 || fields[0].empty()) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected token<TAB>label");
    }
    const int label = label_set.parse_label(fields[1]);
    if (label < 0) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": unknown label \"" + fields[1] + "\"");
    }
    int fixed = label;
    if (LabelSet::is_inside(label)) {
      const int cls = LabelSet::class_of(label);
      const int prev =
          current.labels.empty() ? LabelSet::o_label() : current.labels.back();
      const bool continues =
          prev != LabelSet::o_label() && LabelSet::class_of(prev) == cls;
      if (!continues) {
        fixed = label_set.begin_label(cls);
        ++local.repaired_labels;
      }
    }
    current.tokens.push_back(fields[0]);
    current.labels.push_back(fixed);
  }
  flush();
  if (stats != nullptr) *stats = local;
  return sentences;
}

void save_annotations(const std::string& path,
                      const std::vector<AnnotatedSentence>& sentences,
                      const LabelSet& label_set) {
  std::ostringstream out;
  for (const auto& sentence : sentences) {
    for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
      out << sentence.tokens[i] << '\t'
          << label_set.label_name(sentence.labels[i]) << '\n';
    }
    out << '\n';
  }
  write_text(path, out.str());
}

}  // namespace patmine
