#include "support/synthetic.hpp"

#include <algorithm>
#include <sstream>

#include "patmine/rng.hpp"

namespace patmine::testsupport {
namespace {

template <class T>
const T& pick(const std::vector<T>& items, Rng& rng) {
  return items[static_cast<std::size_t>(uniform_below(rng, items.size()))];
}

}  // namespace

TopicCorpus make_topic_corpus(std::size_t num_docs, Index vocab_size,
                              int num_topics, int mean_doc_len,
                              std::uint64_t seed) {
  Rng rng(seed);
  TopicCorpus corpus;
  corpus.vocab_size = vocab_size;
  corpus.true_topics = Matrix::Zero(num_topics, vocab_size);
  const Index support = vocab_size / num_topics;
  for (int k = 0; k < num_topics; ++k) {
    Real total = 0;
    for (Index v = k * support; v < (k + 1) * support; ++v) {
      corpus.true_topics(k, v) = 0.05 + uniform01(rng);
      total += corpus.true_topics(k, v);
    }
    corpus.true_topics.row(k) /= total;
  }

  for (std::size_t d = 0; d < num_docs; ++d) {
    // Peaked mixtures: one dominant topic per document plus light mixing.
    Vector theta(num_topics);
    for (int k = 0; k < num_topics; ++k) {
      theta[k] = gamma_sample(rng, 0.2, 1.0) + 1e-6;
    }
    const int dominant =
        static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(num_topics)));
    theta[dominant] += 4.0;
    theta /= theta.sum();

    const int len =
        mean_doc_len / 2 +
        static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(mean_doc_len)));
    BowVector bow;
    bow.section_id = "doc" + std::to_string(d);
    for (int w = 0; w < len; ++w) {
      Real r = uniform01(rng);
      int z = 0;
      while (z + 1 < num_topics && r > theta[z]) {
        r -= theta[z];
        ++z;
      }
      r = uniform01(rng);
      Index word = z * support;
      while (word + 1 < (z + 1) * support &&
             r > corpus.true_topics(z, word)) {
        r -= corpus.true_topics(z, word);
        ++word;
      }
      ++bow.counts[word];
      ++bow.total;
    }
    corpus.bows.push_back(std::move(bow));
  }
  return corpus;
}

Blobs make_blobs(std::size_t points_per_blob, int num_blobs, Index dim,
                 Real separation, Real spread, std::uint64_t seed) {
  Rng rng(seed);
  Blobs blobs;
  blobs.centers = Matrix::Zero(num_blobs, dim);
  for (int b = 0; b < num_blobs; ++b) {
    for (Index j = 0; j < dim; ++j) {
      blobs.centers(b, j) = normal01(rng) * separation;
    }
  }
  const std::size_t n = points_per_blob * static_cast<std::size_t>(num_blobs);
  blobs.points.resize(static_cast<Index>(n), dim);
  blobs.true_assignment.resize(n);
  std::size_t row = 0;
  for (int b = 0; b < num_blobs; ++b) {
    for (std::size_t i = 0; i < points_per_blob; ++i, ++row) {
      for (Index j = 0; j < dim; ++j) {
        blobs.points(static_cast<Index>(row), j) =
            blobs.centers(b, j) + normal01(rng) * spread;
      }
      blobs.true_assignment[row] = b;
    }
  }
  return blobs;
}

std::vector<AnnotatedSentence> make_ner_corpus(std::size_t num_sentences,
                                               std::uint64_t seed) {
  const LabelSet labels = LabelSet::pharma();
  const int kAmount = 0, kCondition = 4, kEquipment = 6, kOperation = 10,
            kSolvent = 13;

  const std::vector<std::vector<std::string>> operations = {
      {"granulated"}, {"blended"},  {"compressed"},     {"coated"},
      {"sieved"},     {"milled"},   {"spray", "dried"}, {"wet", "granulated"},
      {"lyophilized"}, {"homogenized"}};
  const std::vector<std::vector<std::string>> solvents = {
      {"ethanol"},  {"methanol"}, {"acetone"},         {"isopropanol"},
      {"toluene"},  {"heptane"},  {"dichloromethane"}, {"acetonitrile"}};
  const std::vector<std::vector<std::string>> amounts = {
      {"500", "mg"}, {"2", "kg"}, {"30", "ml"},  {"1.5", "g"},
      {"250", "ul"}, {"10", "l"}, {"75", "mg"},  {"0.5", "kg"}};
  const std::vector<std::vector<std::string>> equipment = {
      {"granulator"}, {"blender"},  {"reactor"},
      {"extruder"},   {"mixer"},    {"fluid", "bed", "dryer"},
      {"pan", "coater"}, {"homogenizer"}};
  const std::vector<std::vector<std::string>> conditions = {
      {"25", "degrees"},    {"room", "temperature"}, {"60", "degrees"},
      {"reduced", "pressure"}, {"high", "shear"},    {"40", "rpm"}};
  const std::vector<std::string> filler = {
      "the",     "mixture",  "was",     "then",   "into",    "product",
      "slurry",  "solution", "final",   "batch",  "material", "obtained",
      "further", "resulting", "overall", "during", "stage",   "portion"};

  Rng rng(seed);
  std::vector<AnnotatedSentence> sentences;
  sentences.reserve(num_sentences);
  for (std::size_t s = 0; s < num_sentences; ++s) {
    AnnotatedSentence sentence;
    const auto add_filler = [&](int count) {
      for (int i = 0; i < count; ++i) {
        sentence.tokens.push_back(pick(filler, rng));
        sentence.labels.push_back(LabelSet::o_label());
      }
    };
    const auto add_entity = [&](const std::vector<std::vector<std::string>>& lex,
                                int cls) {
      const auto& words = pick(lex, rng);
      for (std::size_t i = 0; i < words.size(); ++i) {
        sentence.tokens.push_back(words[i]);
        sentence.labels.push_back(i == 0 ? labels.begin_label(cls)
                                         : labels.inside_label(cls));
      }
    };
    add_filler(1 + static_cast<int>(uniform_below(rng, 2)));
    add_entity(operations, kOperation);
    add_filler(1 + static_cast<int>(uniform_below(rng, 2)));
    switch (uniform_below(rng, 3)) {
      case 0:
        add_entity(amounts, kAmount);
        add_filler(1);
        add_entity(solvents, kSolvent);
        break;
      case 1:
        add_entity(equipment, kEquipment);
        add_filler(1);
        add_entity(conditions, kCondition);
        break;
      default:
        add_entity(solvents, kSolvent);
        add_filler(1);
        add_entity(amounts, kAmount);
        add_filler(1);
        add_entity(conditions, kCondition);
        break;
    }
    add_filler(1 + static_cast<int>(uniform_below(rng, 2)));
    sentences.push_back(std::move(sentence));
  }
  return sentences;
}

std::vector<RawDocument> make_patent_fixture(std::size_t num_docs,
                                             std::uint64_t seed) {
  const std::vector<std::string> synthesis = {
      "compound", "dissolved", "dichloromethane", "stirred", "reaction",
      "mixture",  "purified",  "silica",          "column",  "yield",
      "residue",  "extracted", "ethyl",           "acetate", "concentrated",
      "vacuo",    "crystallized", "filtered",     "washed",  "intermediate"};
  const std::vector<std::string> formulation = {
      "tablet",    "granules",  "blended",   "lactose",   "magnesium",
      "stearate",  "compressed", "coating",  "capsule",   "excipient",
      "granulation", "binder",  "disintegrant", "sieved", "lubricant",
      "dosage",    "cellulose", "povidone",  "mixer",     "batch"};
  const std::vector<std::string> analytics = {
      "spectrum",  "analysis",  "measured",  "chromatography", "retention",
      "detector",  "wavelength", "purity",   "sample",         "solution",
      "standard",  "calibration", "column",  "method",         "observed",
      "signal",    "baseline",  "dilution",  "procedure",      "instrument"};
  const std::vector<std::vector<std::string>> lexicons = {synthesis,
                                                          formulation,
                                                          analytics};
  const std::vector<std::string> headings = {"EXAMPLE", "PREPARATION",
                                             "PROCESS"};

  Rng rng(seed);
  std::vector<RawDocument> docs;
  docs.reserve(num_docs);
  for (std::size_t d = 0; d < num_docs; ++d) {
    std::ostringstream body;
    body << "This invention relates to pharmaceutical compositions.\n";
    const int sections = 2 + static_cast<int>(uniform_below(rng, 3));
    for (int s = 0; s < sections; ++s) {
      const std::size_t topic = uniform_below(rng, lexicons.size());
      body << pick(headings, rng) << ' ' << (s + 1) << '\n';
      const int sentences = 3 + static_cast<int>(uniform_below(rng, 3));
      for (int line = 0; line < sentences; ++line) {
        const auto& lex = lexicons[topic];
        body << "The";
        const int words = 8 + static_cast<int>(uniform_below(rng, 6));
        for (int w = 0; w < words; ++w) {
          body << ' ' << pick(lex, rng);
          if (w == 3) body << " " << (10 + uniform_below(rng, 90)) << " mg";
        }
        body << ".\n";
      }
    }
    RawDocument doc;
    doc.doc_id = "US" + std::to_string(7000000 + d);
    doc.body = body.str();
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace patmine::testsupport
